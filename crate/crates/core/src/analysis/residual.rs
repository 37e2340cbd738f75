use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Interval;
use crate::integrator::Trajectory;
use crate::lognonlin::f_log;
use crate::quadrature::gl5;

/// A space-time test function with compact support `space × [t0, t1]`,
/// vanishing at both time endpoints.
pub trait SpaceTimeTest {
    fn space_support(&self) -> Interval;
    fn time_support(&self) -> (f64, f64);
    fn value(&self, x: f64, t: f64) -> f64;
    fn d_t(&self, x: f64, t: f64) -> f64;
    fn d_x(&self, x: f64, t: f64) -> f64;
}

/// `φ(x, t) = sin²(π(t − t0)/(t1 − t0)) · sin²(π(x − x0)/(x1 − x0))` on its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableBump {
    pub x0: f64,
    pub x1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl SeparableBump {
    fn theta(&self, t: f64) -> (f64, f64) {
        if t <= self.t0 || t >= self.t1 {
            return (0.0, 0.0);
        }
        let w = PI / (self.t1 - self.t0);
        let s = w * (t - self.t0);
        (s.sin().powi(2), w * (2.0 * s).sin())
    }

    fn psi(&self, x: f64) -> (f64, f64) {
        if x <= self.x0 || x >= self.x1 {
            return (0.0, 0.0);
        }
        let w = PI / (self.x1 - self.x0);
        let s = w * (x - self.x0);
        (s.sin().powi(2), w * (2.0 * s).sin())
    }
}

impl SpaceTimeTest for SeparableBump {
    fn space_support(&self) -> Interval {
        Interval {
            lo: self.x0,
            hi: self.x1,
        }
    }

    fn time_support(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    fn value(&self, x: f64, t: f64) -> f64 {
        self.theta(t).0 * self.psi(x).0
    }

    fn d_t(&self, x: f64, t: f64) -> f64 {
        self.theta(t).1 * self.psi(x).0
    }

    fn d_x(&self, x: f64, t: f64) -> f64 {
        self.theta(t).0 * self.psi(x).1
    }
}

/// Largest defect, over the bundle, of the weak-solution identity
///
/// ```text
/// −∫∫u'φ' + ∫∫∇u∇φ + ∫∫(au' + bu)φ − ∫∫u ln|u|^γ φ
/// ```
///
/// using Gauss–Legendre in space and the trapezoid rule over the recorded
/// steps in time. The source term is dropped for linearized runs.
pub fn weak_residual<T: SpaceTimeTest>(traj: &Trajectory, bundle: &[T]) -> Result<f64> {
    let cfg = &traj.config;
    let fam = cfg.family()?;
    let mesh = &traj.system.mesh;
    let mut worst: f64 = 0.0;
    for phi in bundle {
        let (t0, t1) = phi.time_support();
        let supp = phi.space_support();
        if !(0.0 <= t0 && t0 < t1 && t1 <= cfg.horizon) {
            return Err(Error::Argument(format!(
                "test function time support [{t0}, {t1}] not inside [0, {}]",
                cfg.horizon
            )));
        }
        // Under expansion, containment at t0 gives containment for all later times.
        let dom = fam.domain_at(t0)?;
        if supp.is_empty() || !dom.contains_interval(&supp) {
            return Err(Error::Argument(format!(
                "test function support ({}, {}) not inside Ω_t = ({}, {}) at t = {t0}",
                supp.lo, supp.hi, dom.lo, dom.hi
            )));
        }

        let space_integral = |k: usize| -> f64 {
            let st = &traj.steps[k].state;
            let t = st.t;
            let mut acc = 0.0;
            for e in 0..mesh.num_elements() {
                let cell = mesh.element(e);
                let lo = cell.lo.max(supp.lo);
                let hi = cell.hi.min(supp.hi);
                if hi <= lo {
                    continue;
                }
                let (ul, ur) = mesh.element_values(&st.g, e);
                let (vl, vr) = mesh.element_values(&st.v, e);
                let ux = (ur - ul) / cell.len();
                for (x, w) in gl5(lo, hi) {
                    let s = (x - cell.lo) / cell.len();
                    let u = ul + s * (ur - ul);
                    let ut = vl + s * (vr - vl);
                    let p = phi.value(x, t);
                    let source = if cfg.nonlinear {
                        f_log(u, cfg.gamma)
                    } else {
                        0.0
                    };
                    acc += w
                        * (-ut * phi.d_t(x, t) + ux * phi.d_x(x, t) + (cfg.a * ut + cfg.b * u) * p
                            - source * p);
                }
            }
            acc
        };

        let mut total = 0.0;
        for k in 0..traj.steps.len() - 1 {
            let (ta, tb) = (traj.steps[k].state.t, traj.steps[k + 1].state.t);
            if tb <= t0 || ta >= t1 {
                continue;
            }
            total += 0.5 * (tb - ta) * (space_integral(k) + space_integral(k + 1));
        }
        worst = worst.max(total.abs());
    }
    Ok(worst)
}
