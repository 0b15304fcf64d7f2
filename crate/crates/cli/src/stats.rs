use serde::Serialize;

/// Quantile levels reported for every distribution.
pub const LEVELS: [f64; 5] = [0.0001, 0.25, 0.5, 0.75, 0.9999];

/// Linearly interpolated quantile `q ∈ [0, 1]` of ascending `sorted`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

/// The 0.01/25/50/75/99.99 percentiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Percentiles {
    pub p0_01: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p99_99: f64,
    pub count: usize,
}

impl Percentiles {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().collect();
        v.sort_by(f64::total_cmp);
        let q = LEVELS.map(|l| quantile(&v, l));
        Self {
            p0_01: q[0],
            p25: q[1],
            p50: q[2],
            p75: q[3],
            p99_99: q[4],
            count: v.len(),
        }
    }
}
