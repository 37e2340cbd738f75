//! The logarithmic source `f(u) = u ln|u|^γ` and the stationary functionals
//! built on it: the Nehari functional `I₁`, the potential `J₁`, the fibering
//! root `λ*`, and potential-well membership.
//!
//! All integrals of the nonlinearity use 5-point Gauss–Legendre per element
//! applied to the piecewise-linear interpolant.

use crate::error::{Error, Result};
use crate::fem1d::{AssembledSystem, Mesh1D};
use crate::quadrature::gl5_unit;

/// Largest `ln λ` tolerated before `λ u` overflows in squared quantities.
const MAX_LOG_SCALE: f64 = 300.0;

/// Relative tolerance for the closed-form vs bisection `λ*` cross-check.
pub const LAMBDA_CROSS_CHECK_TOL: f64 = 1e-6;

/// A piecewise-linear function on a mesh, given by its interior nodal values.
#[derive(Debug, Clone, Copy)]
pub struct GridFunction<'a> {
    mesh: &'a Mesh1D,
    coeffs: &'a [f64],
}

impl<'a> GridFunction<'a> {
    pub fn new(mesh: &'a Mesh1D, coeffs: &'a [f64]) -> Result<Self> {
        if coeffs.len() != mesh.m() {
            return Err(Error::Argument(format!(
                "expected {} coefficients, got {}",
                mesh.m(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument(
                "grid function has non-finite entries".into(),
            ));
        }
        Ok(GridFunction { mesh, coeffs })
    }

    pub fn mesh(&self) -> &'a Mesh1D {
        self.mesh
    }

    pub fn coeffs(&self) -> &'a [f64] {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mesh.eval(self.coeffs, x)
    }

    /// `∫_Ω g(u(x)) dx` by per-element Gauss–Legendre; elements where `u ≡ 0`
    /// are skipped (`g(0)` is assumed to be 0).
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for e in 0..self.mesh.num_elements() {
            let (ul, ur) = self.mesh.element_values(self.coeffs, e);
            if ul == 0.0 && ur == 0.0 {
                continue;
            }
            let h = self.mesh.element(e).len();
            let mut acc = 0.0;
            for (s, w) in gl5_unit() {
                acc += w * g(ul * (1.0 - s) + ur * s);
            }
            total += h * acc;
        }
        total
    }
}

/// `f(u) = γ u ln|u|`, extended by 0 at `u = 0`.
#[inline]
pub fn f_log(u: f64, gamma: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        gamma * u * u.abs().ln()
    }
}

/// `u² ln|u|^γ`, extended by 0 at `u = 0`.
#[inline]
pub fn u2_log(u: f64, gamma: f64) -> f64 {
    u * f_log(u, gamma)
}

/// `F(u) = ½u² ln|u|^γ − (γ/4)u²`, the antiderivative of [`f_log`].
#[inline]
pub fn log_potential(u: f64, gamma: f64) -> f64 {
    0.5 * u2_log(u, gamma) - 0.25 * gamma * u * u
}

/// `∫_Ω u² ln|u|^γ dx`.
pub fn log_integral(u: GridFunction<'_>, gamma: f64) -> f64 {
    u.integrate(|v| u2_log(v, gamma))
}

/// Load vector `N_j = ∫ f(u) w_j dx`.
pub fn nonlinear_load(u: GridFunction<'_>, gamma: f64) -> Vec<f64> {
    let mesh = u.mesh();
    let m = mesh.m();
    let mut load = vec![0.0; m];
    for e in 0..mesh.num_elements() {
        let (ul, ur) = mesh.element_values(u.coeffs(), e);
        if ul == 0.0 && ur == 0.0 {
            continue;
        }
        let h = mesh.element(e).len();
        let (mut bl, mut br) = (0.0, 0.0);
        for (s, w) in gl5_unit() {
            let fv = w * f_log(ul * (1.0 - s) + ur * s, gamma);
            bl += fv * (1.0 - s);
            br += fv * s;
        }
        if e >= 1 {
            load[e - 1] += h * bl;
        }
        if e < m {
            load[e] += h * br;
        }
    }
    load
}

/// Difference quotient `(F(b) − F(a)) / (b − a)`, falling back to `f((a+b)/2)`
/// when the quotient would cancel catastrophically.
#[inline]
fn potential_slope(a: f64, b: f64, gamma: f64) -> f64 {
    let d = b - a;
    if d.abs() <= 1e-7 * (a.abs() + b.abs()) {
        f_log(0.5 * (a + b), gamma)
    } else {
        (log_potential(b, gamma) - log_potential(a, gamma)) / d
    }
}

/// Discrete-gradient load between two states: at every quadrature point the
/// source is replaced by the slope of `F` between the two states, so that
/// `N · (g1 − g0)` equals the quadrature of `F(u1) − F(u0)` exactly.
pub fn discrete_gradient_load(mesh: &Mesh1D, g0: &[f64], g1: &[f64], gamma: f64) -> Vec<f64> {
    let m = mesh.m();
    let mut load = vec![0.0; m];
    for e in 0..mesh.num_elements() {
        let (al, ar) = mesh.element_values(g0, e);
        let (bl, br) = mesh.element_values(g1, e);
        if al == 0.0 && ar == 0.0 && bl == 0.0 && br == 0.0 {
            continue;
        }
        let h = mesh.element(e).len();
        let (mut ll, mut rr) = (0.0, 0.0);
        for (s, w) in gl5_unit() {
            let a = al * (1.0 - s) + ar * s;
            let b = bl * (1.0 - s) + br * s;
            let fv = w * potential_slope(a, b, gamma);
            ll += fv * (1.0 - s);
            rr += fv * s;
        }
        if e >= 1 {
            load[e - 1] += h * ll;
        }
        if e < m {
            load[e] += h * rr;
        }
    }
    load
}

/// `I₁(u) = ‖∇u‖² − ∫ u² ln|u|^γ`.
pub fn nehari_i1(u: GridFunction<'_>, sys: &AssembledSystem, gamma: f64) -> f64 {
    sys.stiffness.quad_form(u.coeffs()) - log_integral(u, gamma)
}

/// `J₁(u) = ½‖∇u‖² − ½∫ u² ln|u|^γ + (γ/4)‖u‖²`.
pub fn potential_j1(u: GridFunction<'_>, sys: &AssembledSystem, gamma: f64) -> f64 {
    0.5 * sys.stiffness.quad_form(u.coeffs()) - 0.5 * log_integral(u, gamma)
        + 0.25 * gamma * sys.mass.quad_form(u.coeffs())
}

fn scaled(coeffs: &[f64], lambda: f64) -> Vec<f64> {
    coeffs.iter().map(|c| lambda * c).collect()
}

fn check_fibering_admissible(u: GridFunction<'_>, sys: &AssembledSystem) -> Result<()> {
    if !(sys.stiffness.quad_form(u.coeffs()) > 0.0) {
        return Err(Error::Precondition("λ* needs ‖∇u‖ ≠ 0".into()));
    }
    Ok(())
}

/// Unique positive root of `λ ↦ I₁(λu)`.
///
/// Since `I₁(λu) = λ²[I₁(u) − γ ln λ ‖u‖²]`, the root is
/// `λ* = exp(I₁(u) / (γ‖u‖²))`. The closed form is cross-checked against
/// [`lambda_star_bisection`]; a relative mismatch of [`LAMBDA_CROSS_CHECK_TOL`]
/// or more is an error.
pub fn lambda_star(u: GridFunction<'_>, sys: &AssembledSystem, gamma: f64) -> Result<f64> {
    let closed = lambda_star_closed_form(u, sys, gamma)?;
    let root = lambda_star_bisection(u, sys, gamma)?;
    let rel = (closed - root).abs() / closed;
    if !(rel < LAMBDA_CROSS_CHECK_TOL) {
        return Err(Error::CrossCheck(format!(
            "λ* closed form {closed:e} vs bisection {root:e} (relative {rel:e})"
        )));
    }
    Ok(closed)
}

pub fn lambda_star_closed_form(
    u: GridFunction<'_>,
    sys: &AssembledSystem,
    gamma: f64,
) -> Result<f64> {
    check_fibering_admissible(u, sys)?;
    let norm2 = sys.mass.quad_form(u.coeffs());
    let exponent = nehari_i1(u, sys, gamma) / (gamma * norm2);
    if exponent.abs() > MAX_LOG_SCALE {
        return Err(Error::Precondition(format!(
            "ln λ* = {exponent:.1} is outside the representable range"
        )));
    }
    Ok(exponent.exp())
}

/// Bisection on `ln λ` for the sign change of `I₁(λu)`, evaluating `I₁` on
/// the rescaled function directly.
pub fn lambda_star_bisection(
    u: GridFunction<'_>,
    sys: &AssembledSystem,
    gamma: f64,
) -> Result<f64> {
    check_fibering_admissible(u, sys)?;
    let i1_at = |log_lambda: f64| -> Result<f64> {
        let c = scaled(u.coeffs(), log_lambda.exp());
        Ok(nehari_i1(GridFunction::new(u.mesh(), &c)?, sys, gamma))
    };
    let out_of_range =
        || Error::Precondition("no sign change of I₁(λu) within the representable range".into());
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut width = 2.0;
    while i1_at(lo)? <= 0.0 {
        lo -= width;
        width *= 2.0;
        if lo < -MAX_LOG_SCALE {
            return Err(out_of_range());
        }
    }
    width = 2.0;
    while i1_at(hi)? >= 0.0 {
        hi += width;
        width *= 2.0;
        if hi > MAX_LOG_SCALE {
            return Err(out_of_range());
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if i1_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Lower bound `(e/4)·sqrt(2π/γ)` on the potential-well depth `d`.
///
/// Meaningful for `γ ∈ (0, 1)`; the formula itself is evaluated for any `γ > 0`.
pub fn depth_lower_bound(gamma: f64) -> f64 {
    0.25 * std::f64::consts::E * (2.0 * std::f64::consts::PI / gamma).sqrt()
}

/// Sampling-based upper estimate of `d = inf_{u∈N} J₁(u)`: the smallest
/// `J₁(λ*(v) v)` over the candidates. Diagnostic only.
pub fn depth_upper_estimate(
    candidates: &[Vec<f64>],
    sys: &AssembledSystem,
    gamma: f64,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for v in candidates {
        let gv = GridFunction::new(&sys.mesh, v)?;
        let Ok(lam) = lambda_star(gv, sys, gamma) else {
            continue;
        };
        let nehari = scaled(v, lam);
        best = best.min(potential_j1(
            GridFunction::new(&sys.mesh, &nehari)?,
            sys,
            gamma,
        ));
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Argument("no admissible candidate".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellStatus {
    pub i1: f64,
    pub j1: f64,
    pub d_bound: f64,
    pub in_well: bool,
}

/// Membership in `W = {J₁ < d, I₁ > 0} ∪ {0}`, with the depth `d` replaced by
/// [`depth_lower_bound`].
pub fn well_status(u: GridFunction<'_>, sys: &AssembledSystem, gamma: f64) -> WellStatus {
    let i1 = nehari_i1(u, sys, gamma);
    let j1 = potential_j1(u, sys, gamma);
    let d_bound = depth_lower_bound(gamma);
    WellStatus {
        i1,
        j1,
        d_bound,
        in_well: u.is_zero() || (j1 < d_bound && i1 > 0.0),
    }
}
