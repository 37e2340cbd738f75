//! Fixed Gauss–Legendre rules on a reference interval.

/// 5-point Gauss–Legendre nodes on `[-1, 1]` (exact for degree ≤ 9).
pub const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

pub const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Maps the 5-point rule onto `[a, b]`, yielding `(x, weight)` pairs.
pub fn gl5(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(move |(s, w)| (mid + half * s, half * w))
}

/// Same rule on the unit interval, as `(s, weight)` with `s ∈ (0, 1)`.
pub fn gl5_unit() -> impl Iterator<Item = (f64, f64)> {
    gl5(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_degree_nine_exactly() {
        let exact = (2.0f64.powi(10) - (-1.0f64).powi(10)) / 10.0;
        let q: f64 = gl5(-1.0, 2.0).map(|(x, w)| w * x.powi(9)).sum();
        assert!((q - exact).abs() < 1e-12);
        let total: f64 = gl5_unit().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
