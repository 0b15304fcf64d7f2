use std::path::Path;
use std::process::Command;

use gdbench::records::TIME_COLUMNS;
use gdbench::stats::LEVELS;
use gdbench::{read_records, Percentiles};

fn gdbench(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_gdbench")).args(args).output().expect("spawn gdbench");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn run_to(path: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec!["--pairs", "6", "--poses", "4", "--repeats", "2", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    serde_json::from_str(&gdbench(&args)).unwrap()
}

fn without_times(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.by_ref().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !TIME_COLUMNS.contains(&header[i])).collect();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| cells[i].to_string()).collect()
        })
        .collect()
}

#[test]
fn same_seed_reproduces_records() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    for class in ["curved-primitives", "polytopes", "meshes", "mixed"] {
        let a = dir.join(format!("{class}-a.csv"));
        let b = dir.join(format!("{class}-b.csv"));
        let c = dir.join(format!("{class}-c.csv"));
        run_to(&a, &["--shape-class", class, "--seed", "9", "--vertices", "40"]);
        run_to(&b, &["--shape-class", class, "--seed", "9", "--vertices", "40"]);
        run_to(&c, &["--shape-class", class, "--seed", "10", "--vertices", "40"]);
        assert_eq!(without_times(&a), without_times(&b), "{class}");
        assert_ne!(without_times(&a), without_times(&c), "{class}");
    }
}

#[test]
fn summary_percentiles_match_sorted_records() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let path = dir.join("records.csv");
    let summary = run_to(&path, &["--shape-class", "polytopes", "--vertices", "30"]);
    let (header, records) = read_records(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(header["shape_class"], "polytopes");
    assert_eq!(records.len(), 24);
    assert_eq!(summary["records"], 24);

    let mut times: Vec<f64> = records.iter().map(|r| r.time_ns.unwrap()).collect();
    times.sort_by(f64::total_cmp);
    let naive = |q: f64| {
        let pos = q * (times.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(times.len() - 1);
        times[lo] + (pos - lo as f64) * (times[hi] - times[lo])
    };
    let p = Percentiles::of(times.iter().copied());
    let got = [p.p0_01, p.p25, p.p50, p.p75, p.p99_99];
    for (q, v) in LEVELS.iter().zip(got) {
        assert!((naive(*q) - v).abs() <= 1e-9 * v.abs(), "q={q}: {} vs {v}", naive(*q));
    }
    let reported = summary["time_ns"]["p50"].as_f64().unwrap();
    assert!((reported - p.p50).abs() <= 1e-6 * p.p50);
    assert!(p.p0_01 <= p.p25 && p.p25 <= p.p50 && p.p50 <= p.p75 && p.p75 <= p.p99_99);
}

#[test]
fn polytope_trace_converges_with_shrinking_gap() {
    let csv = gdbench(&[
        "--shape-class",
        "polytopes",
        "--pairs",
        "4",
        "--poses",
        "4",
        "--vertices",
        "200",
        "--trace",
        "5",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,beta_lower,beta_upper,gap"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(!rows.is_empty() && rows.len() <= 100);
    for w in rows.windows(2) {
        assert_eq!(w[1][0], w[0][0] + 1.0);
        assert!(w[1][1] >= w[0][1] * (1.0 - 1e-12), "beta_lower fell at k={}", w[1][0]);
        assert!(w[1][3] <= w[0][3] * (1.0 + 1e-12) + 1e-15, "gap grew at k={}", w[1][0]);
    }
    let last = rows.last().unwrap();
    assert!(last[3] <= 1.49e-8, "final gap {}", last[3]);
    assert!(last[1] <= last[2] * (1.0 + 1e-12));
}

#[test]
fn rejects_out_of_range_trace_and_bad_tolerance() {
    let bin = env!("CARGO_BIN_EXE_gdbench");
    let status = Command::new(bin).args(["--pairs", "2", "--poses", "2", "--trace", "4"]).output().unwrap().status;
    assert!(!status.success());
    let status = Command::new(bin).args(["--pairs", "1", "--eps-tol", "0"]).output().unwrap().status;
    assert!(!status.success());
}
