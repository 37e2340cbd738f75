//! Logarithmic Sobolev, logarithmic Gronwall, and Nakao difference inequalities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem1d::AssembledSystem;
use crate::lognonlin::GridFunction;

/// Agreement required between the closed-form optimal δ and the numerical minimizer.
pub const DELTA_CROSS_CHECK_TOL: f64 = 1e-4;

/// `RHS − LHS` of the one-dimensional logarithmic Sobolev inequality
///
/// ```text
/// 2∫u² ln(|u|/‖u‖) + (1 + ln a)‖u‖² ≤ (a²/π)‖∇u‖²
/// ```
///
/// Non-negative whenever the inequality holds.
pub fn log_sobolev_slack(u: GridFunction<'_>, sys: &AssembledSystem, a_param: f64) -> Result<f64> {
    if !(a_param > 0.0) {
        return Err(Error::Argument(format!(
            "a must be positive, got {a_param}"
        )));
    }
    let norm2 = sys.mass.quad_form(u.coeffs());
    if u.is_zero() || !(norm2 > 0.0) {
        return Err(Error::Precondition("log-Sobolev slack needs u ≢ 0".into()));
    }
    let norm = norm2.sqrt();
    let entropy = u.integrate(|v| {
        if v == 0.0 {
            0.0
        } else {
            v * v * (v.abs() / norm).ln()
        }
    });
    let lhs = 2.0 * entropy + (1.0 + a_param.ln()) * norm2;
    let rhs = a_param * a_param / PI * sys.stiffness.quad_form(u.coeffs());
    Ok(rhs - lhs)
}

/// `(a + w₀)^{e^{at}}`.
pub fn log_gronwall_bound(w0: f64, a: f64, t: f64) -> Result<f64> {
    if !(w0 >= 0.0) || !(a >= 1.0) || !(t >= 0.0) {
        return Err(Error::Argument(format!(
            "need w0 ≥ 0, a ≥ 1, t ≥ 0 (got {w0}, {a}, {t})"
        )));
    }
    Ok((a + w0).powf((a * t).exp()))
}

/// Integrates the extremal case `w' = a w ln(a + w)` with RK4 on `[0, t_end]`
/// and returns `max_t w(t) / bound(t)` (at most 1 when the bound holds).
pub fn gronwall_self_consistency(w0: f64, a: f64, t_end: f64, steps: usize) -> Result<f64> {
    log_gronwall_bound(w0, a, t_end)?;
    if steps == 0 {
        return Err(Error::Argument("need at least one step".into()));
    }
    let rhs = |w: f64| a * w * (a + w).ln();
    let h = t_end / steps as f64;
    let mut w = w0;
    let mut worst: f64 = w0 / log_gronwall_bound(w0, a, 0.0)?;
    for k in 0..steps {
        let k1 = rhs(w);
        let k2 = rhs(w + 0.5 * h * k1);
        let k3 = rhs(w + 0.5 * h * k2);
        let k4 = rhs(w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = (k + 1) as f64 * h;
        worst = worst.max(w / log_gronwall_bound(w0, a, t)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakaoConstants {
    /// `8δ`
    pub d2: f64,
    /// `2/δ + 3 + 2/(2 − γ)`
    pub d3: f64,
    /// Guaranteed rate `ln((d₃ + 1)/(d₃ + d₂))`.
    pub beta: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("need 0 < γ < 1, got {gamma}")))
    }
}

pub fn nakao_constants(delta: f64, gamma: f64) -> Result<NakaoConstants> {
    check_gamma(gamma)?;
    if !(delta > 0.0 && delta < 0.125) {
        return Err(Error::Argument(format!("need 0 < δ < 1/8, got {delta}")));
    }
    let d2 = 8.0 * delta;
    let d3 = 2.0 / delta + 3.0 + 2.0 / (2.0 - gamma);
    Ok(NakaoConstants {
        d2,
        d3,
        beta: ((d3 + 1.0) / (d3 + d2)).ln(),
    })
}

/// Per-unit-time contraction factor `(d₃ + d₂)/(d₃ + 1)` as a function of δ.
pub fn nakao_contraction(delta: f64, gamma: f64) -> f64 {
    let d2 = 8.0 * delta;
    let d3 = 2.0 / delta + 3.0 + 2.0 / (2.0 - gamma);
    (d3 + d2) / (d3 + 1.0)
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSource {
    Formula,
    /// The closed form fell outside `(0, 1/8)`; the numerical minimizer is used.
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaChoice {
    pub delta: f64,
    pub formula: f64,
    pub numerical: f64,
    pub source: DeltaSource,
}

/// The δ minimizing the contraction factor, from the closed form
/// `δ = (16 − √(16² + 4A)) / (−2A)`, `A = 4(4 + 2/(2 − γ))`,
/// verified against a golden-section minimizer on `(0, 1/8)`.
pub fn optimal_delta(gamma: f64) -> Result<DeltaChoice> {
    check_gamma(gamma)?;
    let a = 4.0 * (4.0 + 2.0 / (2.0 - gamma));
    let formula = (16.0 - (256.0 + 4.0 * a).sqrt()) / (-2.0 * a);
    let numerical = golden_section_min(|d| nakao_contraction(d, gamma), 1e-9, 0.125, 1e-12);
    if !(formula > 0.0 && formula < 0.125) {
        return Ok(DeltaChoice {
            delta: numerical,
            formula,
            numerical,
            source: DeltaSource::Numerical,
        });
    }
    if (formula - numerical).abs() > DELTA_CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "optimal δ: closed form {formula} vs minimizer {numerical}"
        )));
    }
    Ok(DeltaChoice {
        delta: formula,
        formula,
        numerical,
        source: DeltaSource::Formula,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NakaoCheck {
    pub holds: bool,
    /// Indices `k` where `φ(k+1) − d₂φ(k) ≤ d₃(φ(k) − φ(k+1))` fails
    /// (or `φ(k)` is negative).
    pub violations: Vec<usize>,
    /// `(d₃ + d₂)/(d₃ + 1)`.
    pub contraction: f64,
    /// `φ(0)·q^k`; an upper bound for the series when `holds`.
    pub envelope: Vec<f64>,
}

/// Checks the difference inequality on unit-spaced samples.
pub fn nakao_difference_check(series: &[f64], d2: f64, d3: f64) -> NakaoCheck {
    let mut violations = Vec::new();
    for (k, w) in series.windows(2).enumerate() {
        let (now, next) = (w[0], w[1]);
        let slack = 1e-14 * now.abs().max(next.abs());
        if now < 0.0 || next - d2 * now > d3 * (now - next) + slack {
            violations.push(k);
        }
    }
    if series.last().is_some_and(|&v| v < 0.0) {
        violations.push(series.len() - 1);
    }
    let contraction = (d3 + d2) / (d3 + 1.0);
    let first = series.first().copied().unwrap_or(0.0);
    NakaoCheck {
        holds: violations.is_empty(),
        violations,
        contraction,
        envelope: (0..series.len())
            .map(|k| first * contraction.powi(k as i32))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{assemble, build_mesh};
    use crate::geometry::Interval;

    #[test]
    fn gronwall_examples() {
        assert_eq!(log_gronwall_bound(0.0, 1.0, 0.0).unwrap(), 1.0);
        assert!((log_gronwall_bound(1.0, 1.0, 2f64.ln()).unwrap() - 4.0).abs() < 1e-12);
        assert!(log_gronwall_bound(-1.0, 1.0, 0.0).is_err());
        assert!(log_gronwall_bound(0.0, 0.5, 0.0).is_err());
        for (w0, a) in [(0.0, 1.0), (0.5, 1.0), (3.0, 2.0), (10.0, 1.5)] {
            assert!(gronwall_self_consistency(w0, a, 1.0, 20_000).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn nakao_constant_examples() {
        let c = nakao_constants(0.058, 0.5).unwrap();
        assert!((c.d2 - 0.464).abs() < 1e-12);
        assert!((c.d3 - 38.8161).abs() < 1e-3);
        assert!((c.beta - 0.013_553_33).abs() < 1e-7);
        for k in 1..125 {
            let c = nakao_constants(k as f64 * 1e-3, 0.3).unwrap();
            assert!(c.beta > 0.0);
        }
        assert!(nakao_constants(0.2, 0.5).is_err());
        assert!(nakao_constants(0.05, 1.0).is_err());
    }

    #[test]
    fn optimal_delta_examples() {
        let choice = optimal_delta(0.5).unwrap();
        assert_eq!(choice.source, DeltaSource::Formula);
        assert!((choice.delta - 0.0580).abs() < 1e-4);
        let d = choice.delta;
        let beta = |x: f64| nakao_constants(x, 0.5).unwrap().beta;
        assert!(beta(d) >= beta(d / 2.0));
        assert!(beta(d) >= beta((2.0 * d).min(0.1249)));
        for k in 1..100 {
            let gamma = k as f64 / 100.0;
            let c = optimal_delta(gamma).unwrap();
            assert!(c.delta > 0.0 && c.delta < 0.125);
            assert!((c.formula - c.numerical).abs() <= DELTA_CROSS_CHECK_TOL);
        }
    }

    #[test]
    fn nakao_check_examples() {
        let flat = nakao_difference_check(&[2.0; 5], 0.5, 1.0);
        assert!(!flat.holds);
        assert_eq!(flat.violations, vec![0, 1, 2, 3]);

        let decaying: Vec<f64> = (0..10).map(|k| (-(k as f64)).exp()).collect();
        let check = nakao_difference_check(&decaying, 0.5, 1.0);
        assert!(check.holds);
        for (v, env) in decaying.iter().zip(&check.envelope) {
            assert!(*v <= env * (1.0 + 1e-15));
        }

        assert!(nakao_difference_check(&[0.0; 6], 0.9, 100.0).holds);
    }

    #[test]
    fn log_sobolev_sine_and_scaling() {
        let mesh = build_mesh(Interval::new(0.0, 1.0).unwrap(), 200).unwrap();
        let sys = assemble(&mesh);
        let c: Vec<f64> = mesh
            .interior_nodes()
            .iter()
            .map(|x| (PI * x).sin())
            .collect();
        let u = GridFunction::new(&mesh, &c).unwrap();
        let s = log_sobolev_slack(u, &sys, 1.0).unwrap();
        // ∫sin² ln(sin/‖sin‖) with ‖sin‖² = 1/2: (1 − 2 ln 2)/4 + (ln 2)/4
        let entropy = (1.0 - 2.0 * 2f64.ln()) / 4.0 + 2f64.ln() / 4.0;
        let oracle = PI * PI / 2.0 / PI - (2.0 * entropy + 0.5);
        assert!((s - oracle).abs() < 1e-3, "{s} vs {oracle}");
        assert!(s >= 0.0);

        let c3: Vec<f64> = c.iter().map(|v| 3.0 * v).collect();
        let s3 = log_sobolev_slack(GridFunction::new(&mesh, &c3).unwrap(), &sys, 1.0).unwrap();
        assert!((s3 - 9.0 * s).abs() < 1e-10 * s3.abs());

        let zero = vec![0.0; 200];
        assert!(log_sobolev_slack(GridFunction::new(&mesh, &zero).unwrap(), &sys, 1.0).is_err());
    }
}
