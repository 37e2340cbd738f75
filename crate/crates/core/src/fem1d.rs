//! Piecewise-linear Galerkin discretization on a uniform mesh of the ambient interval.
//!
//! The basis is the `m` interior hat functions; basis index `j` (0-based)
//! peaks at node `j + 1`. Element `e` spans nodes `e` and `e + 1`, for
//! `e = 0..=m`.

use crate::banded::SymBanded;
use crate::error::{Error, Result};
use crate::geometry::{Interval, MovingDomainFamily};
use crate::quadrature::gl5;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    ambient: Interval,
    nodes: Vec<f64>,
    h: f64,
}

impl Mesh1D {
    /// Number of interior nodes (the Galerkin dimension).
    pub fn m(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn ambient(&self) -> Interval {
        self.ambient
    }

    pub fn interior_nodes(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, e: usize) -> Interval {
        Interval {
            lo: self.nodes[e],
            hi: self.nodes[e + 1],
        }
    }

    /// Nodal values `(u_left, u_right)` of element `e`, with zeros on the
    /// ambient boundary.
    #[inline]
    pub fn element_values(&self, coeffs: &[f64], e: usize) -> (f64, f64) {
        let m = self.m();
        let ul = if e >= 1 { coeffs[e - 1] } else { 0.0 };
        let ur = if e < m { coeffs[e] } else { 0.0 };
        (ul, ur)
    }

    /// Element containing `x` (the last element for `x = x_hi`).
    pub fn locate(&self, x: f64) -> usize {
        let s = ((x - self.ambient.lo) / self.h).floor();
        (s.max(0.0) as usize).min(self.num_elements() - 1)
    }

    /// Evaluates the piecewise-linear interpolant at `x`.
    pub fn eval(&self, coeffs: &[f64], x: f64) -> f64 {
        if !self.ambient.contains_closed(x) {
            return 0.0;
        }
        let e = self.locate(x);
        let cell = self.element(e);
        let (ul, ur) = self.element_values(coeffs, e);
        let s = (x - cell.lo) / self.h;
        ul * (1.0 - s) + ur * s
    }
}

/// Uniform mesh with `m` interior nodes.
pub fn build_mesh(ambient: Interval, m: usize) -> Result<Mesh1D> {
    if m == 0 {
        return Err(Error::Argument(
            "mesh needs at least one interior node".into(),
        ));
    }
    if ambient.is_empty() {
        return Err(Error::Argument("ambient interval is empty".into()));
    }
    let n = m + 1;
    let h = ambient.len() / n as f64;
    let mut nodes: Vec<f64> = (0..=n)
        .map(|k| ambient.lo + ambient.len() * (k as f64) / (n as f64))
        .collect();
    nodes[n] = ambient.hi;
    Ok(Mesh1D { ambient, nodes, h })
}

/// Mass and stiffness matrices of the hat basis.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub mesh: Mesh1D,
    pub mass: SymBanded,
    pub stiffness: SymBanded,
}

/// Exact element-by-element assembly of `M_ij = ∫ w_i w_j` and `K_ij = ∫ w_i' w_j'`.
pub fn assemble(mesh: &Mesh1D) -> AssembledSystem {
    let m = mesh.m();
    let mut mass = SymBanded::zeros(m, 1);
    let mut stiffness = SymBanded::zeros(m, 1);
    for e in 0..mesh.num_elements() {
        let h = mesh.element(e).len();
        let local = local_indices(m, e);
        for (a, ia) in local.iter().enumerate() {
            for (b, ib) in local.iter().enumerate() {
                if let (Some(i), Some(j)) = (ia, ib) {
                    if j > i {
                        continue;
                    }
                    let (mm, kk) = if a == b {
                        (h / 3.0, 1.0 / h)
                    } else {
                        (h / 6.0, -1.0 / h)
                    };
                    mass.add(*i, *j, mm);
                    stiffness.add(*i, *j, kk);
                }
            }
        }
    }
    AssembledSystem {
        mesh: mesh.clone(),
        mass,
        stiffness,
    }
}

/// Interior basis indices of the left and right local hats on element `e`.
#[inline]
fn local_indices(m: usize, e: usize) -> [Option<usize>; 2] {
    [
        if e >= 1 { Some(e - 1) } else { None },
        if e < m { Some(e) } else { None },
    ]
}

/// `Mχ(t)_ij = ∫ χ(·, t) w_i w_j`, integrated exactly over the penalized
/// pieces of each element.
pub fn assemble_penalty(mesh: &Mesh1D, fam: &MovingDomainFamily, t: f64) -> Result<SymBanded> {
    let m = mesh.m();
    let mut pen = SymBanded::zeros(m, 1);
    for e in 0..mesh.num_elements() {
        let cell = mesh.element(e);
        let pieces = fam.overlap(t, cell)?;
        if pieces.is_empty() {
            continue;
        }
        let h = cell.len();
        let hat_l = |x: f64| (cell.hi - x) / h;
        let hat_r = |x: f64| (x - cell.lo) / h;
        // Simpson is exact for the quadratic hat products.
        let (mut ll, mut lr, mut rr) = (0.0, 0.0, 0.0);
        for p in pieces {
            let mid = p.midpoint();
            let wts = [(p.lo, 1.0), (mid, 4.0), (p.hi, 1.0)];
            let scale = p.len() / 6.0;
            for (x, w) in wts {
                let (a, b) = (hat_l(x), hat_r(x));
                ll += scale * w * a * a;
                lr += scale * w * a * b;
                rr += scale * w * b * b;
            }
        }
        let [il, ir] = local_indices(m, e);
        if let Some(i) = il {
            pen.add(i, i, ll);
        }
        if let Some(j) = ir {
            pen.add(j, j, rr);
        }
        if let (Some(i), Some(j)) = (il, ir) {
            pen.add(j, i, lr);
        }
    }
    Ok(pen)
}

/// How initial data on `Ω₀` is transferred to Galerkin coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// Nodal interpolation of the zero extension.
    #[default]
    Interp,
    /// L² projection of the zero extension onto the hat space.
    L2,
}

/// Coefficients `(g(0), g'(0))` for the zero extensions of `u0`, `u1` from `Ω₀` to `Ω`.
pub fn project_initial(
    u0: &dyn Fn(f64) -> f64,
    u1: &dyn Fn(f64) -> f64,
    sys: &AssembledSystem,
    fam: &MovingDomainFamily,
    projection: Projection,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let omega0 = fam.initial();
    let mesh = &sys.mesh;
    let extend = |f: &dyn Fn(f64) -> f64, x: f64| {
        if omega0.contains_open(x) {
            f(x)
        } else {
            0.0
        }
    };
    let project = |f: &dyn Fn(f64) -> f64| -> Result<Vec<f64>> {
        match projection {
            Projection::Interp => Ok(mesh
                .interior_nodes()
                .iter()
                .map(|&x| extend(f, x))
                .collect()),
            Projection::L2 => {
                let m = mesh.m();
                let mut load = vec![0.0; m];
                for e in 0..mesh.num_elements() {
                    let cell = mesh.element(e);
                    let lo = cell.lo.max(omega0.lo);
                    let hi = cell.hi.min(omega0.hi);
                    if hi <= lo {
                        continue;
                    }
                    let [il, ir] = local_indices(m, e);
                    for (x, w) in gl5(lo, hi) {
                        let fx = f(x);
                        let s = (x - cell.lo) / cell.len();
                        if let Some(i) = il {
                            load[i] += w * fx * (1.0 - s);
                        }
                        if let Some(j) = ir {
                            load[j] += w * fx * s;
                        }
                    }
                }
                Ok(sys.mass.cholesky()?.solve(&load))
            }
        }
    };
    let g0 = project(u0)?;
    let v0 = project(u1)?;
    if g0.iter().chain(&v0).any(|c| !c.is_finite()) {
        return Err(Error::Argument("initial data is not finite on Ω₀".into()));
    }
    Ok((g0, v0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryMotion;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn mesh_examples() {
        let mesh = build_mesh(unit(), 3).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(build_mesh(unit(), 1).unwrap().nodes(), &[0.0, 0.5, 1.0]);
        let mesh = build_mesh(Interval::new(-1.0, 1.0).unwrap(), 3).unwrap();
        assert_eq!(mesh.h(), 0.5);
        assert!(matches!(build_mesh(unit(), 0), Err(Error::Argument(_))));
    }

    #[test]
    fn assembled_entries_h_quarter() {
        let sys = assemble(&build_mesh(unit(), 3).unwrap());
        for i in 0..3 {
            assert!((sys.mass.get(i, i) - 1.0 / 6.0).abs() < 1e-15);
            assert!((sys.stiffness.get(i, i) - 8.0).abs() < 1e-12);
        }
        for i in 0..2 {
            assert!((sys.mass.get(i, i + 1) - 1.0 / 24.0).abs() < 1e-15);
            assert!((sys.stiffness.get(i + 1, i) + 4.0).abs() < 1e-12);
        }
        assert_eq!(sys.mass.get(0, 2), 0.0);

        let sys = assemble(&build_mesh(unit(), 1).unwrap());
        assert!((sys.mass.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((sys.stiffness.get(0, 0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mass_row_sums_are_hat_integrals() {
        let mesh = build_mesh(unit(), 9).unwrap();
        let sys = assemble(&mesh);
        // Σ_j M_ij = ∫ w_i Σ_j w_j: the hat integral h, less h/6 next to the boundary
        let sums = sys.mass.row_sums();
        for (i, s) in sums.iter().enumerate() {
            let expect = if i == 0 || i == sums.len() - 1 {
                5.0 * mesh.h() / 6.0
            } else {
                mesh.h()
            };
            assert!((s - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn penalty_vanishes_on_full_domain_and_matches_mass_when_fully_outside() {
        let mesh = build_mesh(unit(), 7).unwrap();
        let sys = assemble(&mesh);
        let full = MovingDomainFamily::new(unit(), unit(), BoundaryMotion::Constant, 1.0).unwrap();
        let pen = assemble_penalty(&mesh, &full, 0.5).unwrap();
        assert!(pen.to_dense().iter().flatten().all(|&v| v == 0.0));

        // right boundary exactly on node 4 (x = 0.5)
        let half = MovingDomainFamily::new(
            unit(),
            Interval::new(0.0, 0.5).unwrap(),
            BoundaryMotion::Constant,
            1.0,
        )
        .unwrap();
        let pen = assemble_penalty(&mesh, &half, 0.0).unwrap();
        // basis 4..6 peak at nodes 5..7, supported right of node 4
        for i in 4..7 {
            for j in 4..7 {
                assert!((pen.get(i, j) - sys.mass.get(i, j)).abs() < 1e-15);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(pen.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn projection_zero_extends() {
        let mesh = build_mesh(unit(), 3).unwrap();
        let sys = assemble(&mesh);
        let fam = MovingDomainFamily::new(
            unit(),
            Interval::new(0.0, 0.5).unwrap(),
            BoundaryMotion::Constant,
            1.0,
        )
        .unwrap();
        let u0 = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
        let u1 = |x: f64| 1.0 + x;
        let (g, v) = project_initial(&u0, &u1, &sys, &fam, Projection::Interp).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert_eq!(g[1], 0.0); // x = 0.5 is on ∂Ω₀
        assert_eq!(g[2], 0.0);
        assert_eq!(v[2], 0.0);
        let zero = |_: f64| 0.0;
        let (g, v) = project_initial(&zero, &zero, &sys, &fam, Projection::Interp).unwrap();
        assert!(g.iter().chain(&v).all(|&c| c == 0.0));
    }

    #[test]
    fn l2_projection_reproduces_hat_space() {
        let mesh = build_mesh(unit(), 5).unwrap();
        let sys = assemble(&mesh);
        let fam = MovingDomainFamily::new(unit(), unit(), BoundaryMotion::Constant, 1.0).unwrap();
        let target = [0.3, -1.0, 2.0, 0.5, 0.1];
        let f = |x: f64| mesh.eval(&target, x);
        let (g, _) = project_initial(&f, &f, &sys, &fam, Projection::L2).unwrap();
        for (a, b) in g.iter().zip(target) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
