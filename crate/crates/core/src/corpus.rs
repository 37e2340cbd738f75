//! Seeded random grid functions for inequality checks.
//!
//! Each function is a sine series `Σ_{k=1}^{n} c_k sin(kπ(x − x_lo)/|Ω|)`
//! interpolated onto the mesh, with `n` uniform in `1..=max_modes` and each
//! `|c_k|` uniform in `[0.01, 10]` with a random sign. The generator is
//! ChaCha8 seeded with `seed`, so a seed fully determines the corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem1d::Mesh1D;

pub const AMPLITUDE_RANGE: (f64, f64) = (0.01, 10.0);
pub const DEFAULT_MAX_MODES: u32 = 8;

pub fn random_fourier_corpus(
    mesh: &Mesh1D,
    seed: u64,
    count: usize,
    max_modes: u32,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amb = mesh.ambient();
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_modes.max(1));
            let coeffs: Vec<f64> = (0..n)
                .map(|_| {
                    let mag = rng.random_range(AMPLITUDE_RANGE.0..=AMPLITUDE_RANGE.1);
                    if rng.random_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            mesh.interior_nodes()
                .iter()
                .map(|&x| {
                    let s = (x - amb.lo) / amb.len();
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * s).sin())
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::build_mesh;
    use crate::geometry::Interval;

    #[test]
    fn seed_determines_corpus() {
        let mesh = build_mesh(Interval::new(0.0, 1.0).unwrap(), 30).unwrap();
        let a = random_fourier_corpus(&mesh, 7, 5, 8);
        let b = random_fourier_corpus(&mesh, 7, 5, 8);
        let c = random_fourier_corpus(&mesh, 8, 5, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .iter()
            .all(|f| f.len() == 30 && f.iter().any(|v| *v != 0.0)));
    }
}
