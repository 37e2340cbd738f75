#![allow(dead_code)]

use logwave_core::config::{parse_config, ExperimentConfig};
use logwave_core::fem1d::Mesh1D;
use logwave_core::geometry::MovingDomainFamily;

pub const REFERENCE_CFG: &str = include_str!("../../../../configs/reference.cfg");

pub fn reference() -> ExperimentConfig {
    parse_config(REFERENCE_CFG).expect("reference config parses")
}

/// Hat function of interior node `j` (peak at `nodes[j + 1]`), from its definition.
pub fn hat(mesh: &Mesh1D, j: usize, x: f64) -> f64 {
    let h = mesh.h();
    (1.0 - (x - mesh.nodes()[j + 1]).abs() / h).max(0.0)
}

pub fn hat_slope(mesh: &Mesh1D, j: usize, x: f64) -> f64 {
    let c = mesh.nodes()[j + 1];
    let h = mesh.h();
    if (x - c).abs() >= h {
        0.0
    } else if x < c {
        1.0 / h
    } else {
        -1.0 / h
    }
}

/// Midpoint Riemann sum of `f` on `[lo, hi]` with `n` cells.
pub fn riemann(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let dx = (hi - lo) / n as f64;
    (0..n).map(|k| f(lo + (k as f64 + 0.5) * dx)).sum::<f64>() * dx
}

/// `∫ w_i w_j χ`, `∫ w_i w_j`, `∫ w_i' w_j'` by Riemann sums on the overlap of the
/// two supports, split at the boundary points of `Ω_t` so that every cell sees
/// a constant indicator.
pub struct RiemannEntries {
    pub mass: f64,
    pub stiffness: f64,
    pub penalty: f64,
}

pub fn riemann_entries(
    mesh: &Mesh1D,
    fam: &MovingDomainFamily,
    t: f64,
    i: usize,
    j: usize,
    cells: usize,
) -> RiemannEntries {
    let h = mesh.h();
    let lo = mesh.nodes()[i.max(j)];
    let hi = mesh.nodes()[i.min(j) + 2];
    let (l, r) = fam.endpoints(t).unwrap();
    let mut breaks = vec![lo, hi, mesh.nodes()[i + 1], mesh.nodes()[j + 1]];
    breaks.extend([l, r].into_iter().filter(|&p| lo < p && p < hi));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut out = RiemannEntries {
        mass: 0.0,
        stiffness: 0.0,
        penalty: 0.0,
    };
    for w in breaks.windows(2) {
        if w[1] - w[0] <= 1e-15 * h {
            continue;
        }
        let chi = f64::from(fam.indicator(0.5 * (w[0] + w[1]), t).unwrap());
        let mass = riemann(w[0], w[1], cells, |x| hat(mesh, i, x) * hat(mesh, j, x));
        out.mass += mass;
        out.penalty += chi * mass;
        out.stiffness += riemann(w[0], w[1], cells, |x| {
            hat_slope(mesh, i, x) * hat_slope(mesh, j, x)
        });
    }
    out
}

/// `exp(A)` for a 2×2 matrix by scaling and squaring of the Taylor series.
pub fn expm2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let norm = a.iter().flatten().map(|v| v.abs()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scale = 2f64.powi(s);
    let b = a.map(|row| row.map(|v| v / scale));
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        let mut z = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                z[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
            }
        }
        z
    };
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    let mut sum = term;
    for k in 1..30 {
        term = mul(term, b).map(|row| row.map(|v| v / k as f64));
        for r in 0..2 {
            for c in 0..2 {
                sum[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..s {
        sum = mul(sum, sum);
    }
    sum
}

/// Generalized eigenvalue `λ_k` of `K v = λ M v` on a uniform mesh of `(0, 1)`
/// with spacing `h`; the eigenvector is `v_j = sin(kπ x_j)`.
pub fn discrete_eigenvalue(k: usize, h: f64) -> f64 {
    let c = (k as f64 * std::f64::consts::PI * h).cos();
    (2.0 / h) * (1.0 - c) / ((h / 3.0) * (2.0 + c))
}
