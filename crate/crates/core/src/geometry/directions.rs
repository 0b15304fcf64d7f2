use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Vector;

/// Deterministic, roughly uniform unit directions.
///
/// Uniform angles in 2D, a Fibonacci sphere in 3D and seeded Gaussian samples
/// in higher dimensions. The same `n` always yields the same set.
pub fn unit_directions<const L: usize>(n: usize) -> Vec<Vector<L>> {
    match L {
        2 => (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64) / (n as f64);
                let mut v = Vector::<L>::zeros();
                v[0] = t.cos();
                v[1] = t.sin();
                v
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / (n as f64);
                    let r = (1.0 - y * y).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    let mut v = Vector::<L>::zeros();
                    v[0] = r * phi.cos();
                    v[1] = y;
                    v[2] = r * phi.sin();
                    v
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ec_7105 ^ L as u64);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let v = Vector::<L>::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let norm = v.norm();
                if norm > 1e-9 {
                    out.push(v / norm);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_unit_and_deterministic() {
        let a = unit_directions::<3>(257);
        assert_eq!(a, unit_directions::<3>(257));
        assert!(a.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let b = unit_directions::<5>(40);
        assert!(b.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        assert_eq!(unit_directions::<2>(4)[1].x.abs() < 1e-15, true);
    }

    #[test]
    fn fibonacci_covers_the_sphere() {
        let dirs = unit_directions::<3>(1000);
        // every probe direction has a sample within ~6 degrees
        for probe in unit_directions::<3>(97) {
            let best = dirs.iter().map(|d| d.dot(&probe)).fold(f64::MIN, f64::max);
            assert!(best > 0.1f64.cos(), "gap too large: {best}");
        }
    }
}
