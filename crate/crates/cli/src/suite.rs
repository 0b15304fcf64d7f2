use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use growth_distance::{growth_distance, Config, DifferencePair, GrowthError, GrowthResult, Status, WarmStartData};

use crate::config::BenchConfig;
use crate::instances::{generate_instances, InstanceError, PairSpec};
use crate::records::{status_name, BenchRecord};
use crate::stats::{median, Percentiles};

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Instances(#[from] InstanceError),
    #[error("instance {instance}: {source}")]
    Solver { instance: u64, source: GrowthError },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Paired cold/warm comparison at the displaced poses.
#[derive(Debug, Clone, Serialize)]
pub struct WarmSummary {
    pub median_cold_iterations: f64,
    pub median_warm_iterations: f64,
    pub total_cold_iterations: usize,
    pub total_warm_iterations: usize,
    pub median_cold_time_ns: Option<f64>,
    pub median_warm_time_ns: Option<f64>,
    /// Median of per-instance `warm - cold` wall time.
    pub median_time_delta_ns: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub shape_class: &'static str,
    pub records: usize,
    pub time_ns: Option<Percentiles>,
    pub iterations: Percentiles,
    pub max_primal_infeasibility: f64,
    /// Records whose status is MaxIterations or NumericalFailure.
    pub convergence_failures: usize,
    pub status_counts: BTreeMap<String, usize>,
    pub max_analytic_rel_err: Option<f64>,
    pub warm: Option<WarmSummary>,
}

impl Summary {
    pub fn from_records(config: &BenchConfig, records: &[BenchRecord]) -> Self {
        let mut status_counts = BTreeMap::new();
        for r in records {
            *status_counts.entry(r.status.clone()).or_insert(0) += 1;
        }
        let failed = |s: &str| s == status_name(Status::MaxIterations) || s == status_name(Status::NumericalFailure);
        let times: Vec<f64> = records.iter().filter_map(|r| r.time_ns).collect();
        let max_opt = |xs: Vec<f64>| xs.into_iter().reduce(f64::max);
        let warm = config.warm_start.then(|| {
            let cold: Vec<usize> = records.iter().filter_map(|r| r.warm_cold_iterations).collect();
            let warm: Vec<usize> = records.iter().filter_map(|r| r.warm_iterations).collect();
            let as_f = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
            let cold_t: Vec<f64> = records.iter().filter_map(|r| r.warm_cold_time_ns).collect();
            let warm_t: Vec<f64> = records.iter().filter_map(|r| r.warm_time_ns).collect();
            let delta: Vec<f64> = records
                .iter()
                .filter_map(|r| Some(r.warm_time_ns? - r.warm_cold_time_ns?))
                .collect();
            let med = |v: &[f64]| (!v.is_empty()).then(|| median(v));
            WarmSummary {
                median_cold_iterations: median(&as_f(&cold)),
                median_warm_iterations: median(&as_f(&warm)),
                total_cold_iterations: cold.iter().sum(),
                total_warm_iterations: warm.iter().sum(),
                median_cold_time_ns: med(&cold_t),
                median_warm_time_ns: med(&warm_t),
                median_time_delta_ns: med(&delta),
            }
        });
        Self {
            shape_class: config.shape_class.name(),
            records: records.len(),
            time_ns: (!times.is_empty()).then(|| Percentiles::of(times)),
            iterations: Percentiles::of(records.iter().map(|r| r.iterations as f64)),
            max_primal_infeasibility: records.iter().map(|r| r.primal_infeasibility).fold(0.0, f64::max),
            convergence_failures: records.iter().filter(|r| failed(&r.status)).count(),
            status_counts,
            max_analytic_rel_err: max_opt(records.iter().filter_map(|r| r.analytic_rel_err).collect()),
            warm,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub records: Vec<BenchRecord>,
    pub summary: Summary,
}

/// `‖(p¹ + α(z¹ - p¹)) - (p² + α(z² - p²))‖`: distance between the scaled
/// witnesses, zero for an exact solution.
pub fn primal_infeasibility(pair: &DifferencePair<'_, 3>, result: &GrowthResult<3>) -> f64 {
    let c1 = pair.world_center1();
    let c2 = pair.world_center2();
    let x1 = c1 + (result.witness1 - c1) * result.alpha;
    let x2 = c2 + (result.witness2 - c2) * result.alpha;
    (x1 - x2).norm()
}

/// Solves once, then (with timing) repeats the call and returns the mean wall time.
fn timed_solve(
    pair: &DifferencePair<'_, 3>,
    solver: &Config,
    warm: Option<&WarmStartData<3>>,
    config: &BenchConfig,
) -> Result<(GrowthResult<3>, Option<f64>), GrowthError> {
    let result = growth_distance(pair, solver, warm)?;
    if !config.timing {
        return Ok((result, None));
    }
    let repeats = config.repeats_per_call.max(1);
    let start = Instant::now();
    for _ in 0..repeats {
        black_box(growth_distance(black_box(pair), solver, warm)?);
    }
    let ns = start.elapsed().as_nanos() as f64 / repeats as f64;
    Ok((result, Some(ns)))
}

/// Records for every pose of one pair.
pub fn run_pair(spec: &PairSpec, config: &BenchConfig) -> Result<Vec<BenchRecord>, SuiteError> {
    let solver = config.solver_config();
    let poses = spec.poses.len() as u64;
    (0..spec.poses.len())
        .map(|k| {
            let instance = spec.id * poses + k as u64;
            let wrap = |source| SuiteError::Solver { instance, source };
            let pair = spec.pair(k);
            let (result, time_ns) = timed_solve(&pair, &solver, None, config).map_err(wrap)?;
            let analytic_alpha = spec.analytic_alpha(k);
            let mut record = BenchRecord {
                instance_id: instance,
                pair_id: spec.id,
                pose_id: k as u64,
                shape1: spec.body1.kind().to_string(),
                shape2: spec.body2.kind().to_string(),
                vertices1: spec.body1.vertices,
                vertices2: spec.body2.vertices,
                alpha: result.alpha,
                iterations: result.iterations,
                status: status_name(result.status).to_string(),
                gap: result.gap,
                time_ns,
                primal_infeasibility: primal_infeasibility(&pair, &result),
                analytic_alpha,
                analytic_rel_err: analytic_alpha.map(|a| (result.alpha - a).abs() / a.max(1e-12)),
                warm_cold_iterations: None,
                warm_cold_time_ns: None,
                warm_iterations: None,
                warm_time_ns: None,
                warm_alpha: None,
                warm_status: None,
                warm_points_used: None,
            };
            if config.warm_start {
                let moved = spec.displaced_pair(k);
                let (cold, cold_t) = timed_solve(&moved, &solver, None, config).map_err(wrap)?;
                let (warm, warm_t) =
                    timed_solve(&moved, &solver, Some(&result.warm_start), config).map_err(wrap)?;
                record.warm_cold_iterations = Some(cold.iterations);
                record.warm_cold_time_ns = cold_t;
                record.warm_iterations = Some(warm.iterations);
                record.warm_time_ns = warm_t;
                record.warm_alpha = Some(warm.alpha);
                record.warm_status = Some(status_name(warm.status).to_string());
                record.warm_points_used = Some(warm.warm_points_used);
            }
            Ok(record)
        })
        .collect()
}

/// Records for `specs` in instance order, using `config.jobs` workers.
pub fn run_specs(specs: &[PairSpec], config: &BenchConfig) -> Result<Vec<BenchRecord>, SuiteError> {
    let per_pair: Vec<Vec<BenchRecord>> = if config.jobs <= 1 {
        specs.iter().map(|s| run_pair(s, config)).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
        pool.install(|| specs.par_iter().map(|s| run_pair(s, config)).collect::<Result<_, _>>())?
    };
    Ok(per_pair.into_iter().flatten().collect())
}

/// Generates the instances of `config`, runs them and summarizes.
pub fn run_suite(config: &BenchConfig) -> Result<SuiteOutput, SuiteError> {
    let specs = generate_instances(config)?;
    let records = run_specs(&specs, config)?;
    let summary = Summary::from_records(config, &records);
    Ok(SuiteOutput { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ShapeClass;

    #[test]
    fn counts_one_record_per_pose() {
        let config = BenchConfig {
            pairs: 10,
            poses_per_pair: 2,
            repeats_per_call: 1,
            ..BenchConfig::default()
        };
        let out = run_suite(&config).unwrap();
        assert_eq!(out.records.len(), 20);
        assert_eq!(out.summary.records, 20);
        assert_eq!(out.summary.time_ns.unwrap().count, 20);
        assert_eq!(out.summary.iterations.count, 20);
        let ids: Vec<u64> = out.records.iter().map(|r| r.instance_id).collect();
        assert_eq!(ids, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn sphere_suite_reports_analytic_error() {
        let config = BenchConfig {
            shape_class: ShapeClass::Spheres,
            pairs: 20,
            poses_per_pair: 5,
            timing: false,
            ..BenchConfig::default()
        };
        let out = run_suite(&config).unwrap();
        let err = out.summary.max_analytic_rel_err.unwrap();
        assert!(err <= 1.49e-8, "{err}");
        assert_eq!(out.summary.convergence_failures, 0);
        assert!(out.summary.time_ns.is_none());
    }

    #[test]
    fn parallel_run_matches_serial() {
        let config = BenchConfig {
            shape_class: ShapeClass::Mixed,
            pairs: 12,
            poses_per_pair: 3,
            timing: false,
            ..BenchConfig::default()
        };
        let serial = run_suite(&config).unwrap().records;
        let parallel = run_suite(&BenchConfig { jobs: 4, ..config }).unwrap().records;
        assert_eq!(serial, parallel);
    }

    #[test]
    fn warm_mode_fills_paired_columns() {
        let config = BenchConfig {
            shape_class: ShapeClass::Polytopes,
            vertices: 30,
            pairs: 4,
            poses_per_pair: 3,
            repeats_per_call: 2,
            warm_start: true,
            ..BenchConfig::default()
        };
        let out = run_suite(&config).unwrap();
        for r in &out.records {
            assert!(r.warm_iterations.is_some() && r.warm_cold_iterations.is_some());
            assert!(r.warm_time_ns.is_some());
            let rel = (r.warm_alpha.unwrap() - r.alpha).abs() / r.alpha;
            assert!(rel < 0.2, "{rel}");
        }
        assert!(out.summary.warm.is_some());
    }
}
