use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;

use gdbench::instances::{generate_pair, mesh_pool};
use gdbench::{run_suite, trace_convergence, write_records, write_trace_csv, BenchConfig, ShapeClass};

/// Growth distance benchmark harness.
///
/// Writes one CSV record per (pair, pose) to --out and prints a JSON summary.
/// With --trace, writes the convergence table of one instance instead.
#[derive(Debug, Parser)]
#[command(name = "gdbench", version)]
struct Args {
    #[arg(long, value_enum, default_value = "curved-primitives")]
    shape_class: ShapeClass,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    /// Poses per pair.
    #[arg(long, default_value_t = 100)]
    poses: usize,
    /// Timed calls per query; the record holds their mean.
    #[arg(long, default_value_t = 100)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decades spanned by the primitive size parameters.
    #[arg(long, default_value_t = 2.0)]
    scale_span: f64,
    #[arg(long, default_value_t = 1.49e-8)]
    eps_tol: f64,
    #[arg(long, default_value_t = 100)]
    k_max: usize,
    /// Also solve each instance after a small rigid displacement, cold and warm.
    #[arg(long)]
    warm_start: bool,
    /// Displacement as a fraction of body size (rotation in radians).
    #[arg(long, default_value_t = 0.01)]
    displacement_frac: f64,
    /// Instance id whose convergence trace to write.
    #[arg(long)]
    trace: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory of .off/.json meshes replacing the synthetic mesh pool.
    #[arg(long)]
    mesh_dir: Option<PathBuf>,
    /// Vertex count of polytope-class shapes.
    #[arg(long, default_value_t = 100)]
    vertices: usize,
    /// Worker threads. Timings are cleanest with 1.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Check every hill-climbing support against an exhaustive scan.
    #[arg(long)]
    verify_climb: bool,
}

impl Args {
    fn config(&self) -> BenchConfig {
        BenchConfig {
            shape_class: self.shape_class,
            pairs: self.pairs,
            poses_per_pair: self.poses,
            repeats_per_call: self.repeats,
            seed: self.seed,
            scale_span_decades: self.scale_span,
            warm_start: self.warm_start,
            displacement_frac: self.displacement_frac,
            eps_tol: self.eps_tol,
            k_max: self.k_max,
            vertices: self.vertices,
            mesh_dir: self.mesh_dir.clone(),
            jobs: self.jobs,
            verify_mesh_climb: self.verify_climb,
            timing: true,
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn main() -> Result<()> {
    let args = Args::parse();
    let config = args.config();
    if config.pairs == 0 || config.poses_per_pair == 0 {
        bail!("--pairs and --poses must be positive");
    }
    config.solver_config().validate::<3>()?;

    if let Some(id) = args.trace {
        let pair_id = id / config.poses_per_pair as u64;
        let pose = (id % config.poses_per_pair as u64) as usize;
        if pair_id >= config.pairs as u64 {
            bail!("instance {id} is outside {} pairs x {} poses", config.pairs, config.poses_per_pair);
        }
        let pool = mesh_pool(&config)?;
        let spec = generate_pair(&config, pair_id, pool.as_ref())?;
        let rows = trace_convergence(&spec.pair(pose), &config.solver_config())?;
        write_trace_csv(output(&args.out)?, &rows)?;
        return Ok(());
    }

    let out = run_suite(&config)?;
    write_records(output(&args.out)?, &config, &out.records)?;
    let summary = serde_json::to_string_pretty(&out.summary)?;
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
