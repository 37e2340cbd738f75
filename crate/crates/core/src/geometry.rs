//! The ambient cylinder and the expanding family of sub-intervals it contains.
//!
//! A [`MovingDomainFamily`] is the fixed interval `Ω = (x_lo, x_hi)` together
//! with a time-parametrized sub-interval `Ω_t = (left(t), right(t))`. Everything
//! outside `Ω_t` is the penalized region, marked by the indicator `χ(·, t)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Relative slack when range-checking times and coordinates produced by
/// floating-point arithmetic (e.g. `k * dt` landing one ulp past `T`).
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::Argument(format!("bad interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Strict interior membership.
    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Boundary endpoints as a function of time: `t ↦ (left(t), right(t))`.
pub type BoundaryFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// How the endpoints of `Ω_t` move. All closed-form kinds expand monotonically.
#[derive(Clone)]
pub enum BoundaryMotion {
    /// `Ω_t ≡ Ω₀` (the cylindrical case).
    Constant,
    /// Endpoints move outward at constant speed, clamped to the ambient interval.
    Linear { left_speed: f64, right_speed: f64 },
    /// `right(t) = R∞ − (R∞ − R₀)e^{−kt}` and symmetrically for the left end.
    Saturating {
        left_inf: f64,
        right_inf: f64,
        rate: f64,
    },
    /// Arbitrary user motion; accepted only after passing [`MovingDomainFamily::verify_monotone`].
    Custom(BoundaryFn),
}

impl fmt::Debug for BoundaryMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMotion::Constant => write!(f, "Constant"),
            BoundaryMotion::Linear {
                left_speed,
                right_speed,
            } => f
                .debug_struct("Linear")
                .field("left_speed", left_speed)
                .field("right_speed", right_speed)
                .finish(),
            BoundaryMotion::Saturating {
                left_inf,
                right_inf,
                rate,
            } => f
                .debug_struct("Saturating")
                .field("left_inf", left_inf)
                .field("right_inf", right_inf)
                .field("rate", rate)
                .finish(),
            BoundaryMotion::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Outcome of a monotonicity scan over sample times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Monotonicity {
    Holds,
    /// First consecutive pair `(t1, t2)` with `Ω_{t1} ⊄ Ω_{t2}`.
    Violated {
        t1: f64,
        t2: f64,
    },
}

impl Monotonicity {
    pub fn holds(&self) -> bool {
        matches!(self, Monotonicity::Holds)
    }
}

#[derive(Debug, Clone)]
pub struct MovingDomainFamily {
    ambient: Interval,
    initial: Interval,
    motion: BoundaryMotion,
    horizon: f64,
}

impl MovingDomainFamily {
    /// Builds a family from a closed-form motion. `initial` is `Ω₀`.
    pub fn new(
        ambient: Interval,
        initial: Interval,
        motion: BoundaryMotion,
        horizon: f64,
    ) -> Result<Self> {
        if ambient.is_empty() {
            return Err(Error::Argument("ambient interval is empty".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Argument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if initial.is_empty() || !ambient.contains_interval(&initial) {
            return Err(Error::Argument(format!(
                "initial domain ({}, {}) must be a nonempty subinterval of ({}, {})",
                initial.lo, initial.hi, ambient.lo, ambient.hi
            )));
        }
        match &motion {
            BoundaryMotion::Constant => {}
            BoundaryMotion::Linear {
                left_speed,
                right_speed,
            } => {
                if !(*left_speed >= 0.0 && *right_speed >= 0.0) {
                    return Err(Error::Argument(
                        "linear boundary speeds must be non-negative".into(),
                    ));
                }
            }
            BoundaryMotion::Saturating {
                left_inf,
                right_inf,
                rate,
            } => {
                if !(*rate >= 0.0) {
                    return Err(Error::Argument(
                        "saturating rate must be non-negative".into(),
                    ));
                }
                if !(ambient.lo <= *left_inf
                    && *left_inf <= initial.lo
                    && initial.hi <= *right_inf
                    && *right_inf <= ambient.hi)
                {
                    return Err(Error::Argument(
                        "saturating limits must satisfy x_lo ≤ left_inf ≤ left0 and right0 ≤ right_inf ≤ x_hi"
                            .into(),
                    ));
                }
            }
            BoundaryMotion::Custom(_) => {
                return Err(Error::Argument(
                    "custom motion must be built with MovingDomainFamily::custom".into(),
                ))
            }
        }
        Ok(MovingDomainFamily {
            ambient,
            initial,
            motion,
            horizon,
        })
    }

    /// Builds a family from an arbitrary endpoint function. The function is
    /// sampled at `samples`; it must stay inside the ambient interval, be
    /// nonempty, and expand monotonically on those samples.
    pub fn custom(
        ambient: Interval,
        horizon: f64,
        endpoints: BoundaryFn,
        samples: &[f64],
    ) -> Result<Self> {
        let (l0, r0) = endpoints(0.0);
        let fam = MovingDomainFamily {
            ambient,
            initial: Interval::new(l0, r0)?,
            motion: BoundaryMotion::Custom(endpoints),
            horizon,
        };
        if ambient.is_empty() || !(horizon > 0.0) {
            return Err(Error::Argument("bad ambient interval or horizon".into()));
        }
        for &t in samples {
            let (l, r) = fam.endpoints(t)?;
            if !(ambient.lo <= l && l < r && r <= ambient.hi) {
                return Err(Error::Argument(format!(
                    "Ω_t = ({l}, {r}) at t = {t} is empty or leaves the ambient interval"
                )));
            }
        }
        match fam.verify_monotone(samples)? {
            Monotonicity::Holds => Ok(fam),
            Monotonicity::Violated { t1, t2 } => Err(Error::Argument(format!(
                "boundary motion is not expanding between t = {t1} and t = {t2}"
            ))),
        }
    }

    pub fn ambient(&self) -> Interval {
        self.ambient
    }

    pub fn initial(&self) -> Interval {
        self.initial
    }

    pub fn motion(&self) -> &BoundaryMotion {
        &self.motion
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = RANGE_SLACK * self.horizon.max(1.0);
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::Domain(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }

    fn check_coord(&self, x: f64) -> Result<()> {
        let slack = RANGE_SLACK * self.ambient.len();
        if !(x >= self.ambient.lo - slack && x <= self.ambient.hi + slack) {
            return Err(Error::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.ambient.lo, self.ambient.hi
            )));
        }
        Ok(())
    }

    /// `(left(t), right(t))`.
    pub fn endpoints(&self, t: f64) -> Result<(f64, f64)> {
        self.check_time(t)?;
        let t = t.clamp(0.0, self.horizon);
        let (l0, r0) = (self.initial.lo, self.initial.hi);
        Ok(match &self.motion {
            BoundaryMotion::Constant => (l0, r0),
            BoundaryMotion::Linear {
                left_speed,
                right_speed,
            } => (
                (l0 - left_speed * t).max(self.ambient.lo),
                (r0 + right_speed * t).min(self.ambient.hi),
            ),
            BoundaryMotion::Saturating {
                left_inf,
                right_inf,
                rate,
            } => {
                let decay = (-rate * t).exp();
                (
                    left_inf + (l0 - left_inf) * decay,
                    right_inf - (right_inf - r0) * decay,
                )
            }
            BoundaryMotion::Custom(f) => f(t),
        })
    }

    pub fn domain_at(&self, t: f64) -> Result<Interval> {
        let (l, r) = self.endpoints(t)?;
        Ok(Interval { lo: l, hi: r })
    }

    /// `χ(x, t)`: 0 strictly inside `Ω_t`, 1 elsewhere (boundary points included).
    pub fn indicator(&self, x: f64, t: f64) -> Result<u8> {
        self.check_coord(x)?;
        let dom = self.domain_at(t)?;
        Ok(if dom.contains_open(x) { 0 } else { 1 })
    }

    /// Checks `Ω_{t_k} ⊆ Ω_{t_{k+1}}` over consecutive sample times.
    pub fn verify_monotone(&self, samples: &[f64]) -> Result<Monotonicity> {
        if samples.is_empty() {
            return Err(Error::Argument("no sample times given".into()));
        }
        if samples.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Argument(
                "sample times must be sorted ascending".into(),
            ));
        }
        let mut prev = self.endpoints(samples[0])?;
        for w in samples.windows(2) {
            let next = self.endpoints(w[1])?;
            if next.0 > prev.0 || next.1 < prev.1 {
                return Ok(Monotonicity::Violated { t1: w[0], t2: w[1] });
            }
            prev = next;
        }
        Ok(Monotonicity::Holds)
    }

    /// The part of `cell` where `χ(·, t) = 1`, as at most two disjoint pieces.
    pub fn overlap(&self, t: f64, cell: Interval) -> Result<Vec<Interval>> {
        self.check_coord(cell.lo)?;
        self.check_coord(cell.hi)?;
        let dom = self.domain_at(t)?;
        let mut pieces = Vec::with_capacity(2);
        let left_end = cell.hi.min(dom.lo);
        if left_end > cell.lo {
            pieces.push(Interval {
                lo: cell.lo,
                hi: left_end,
            });
        }
        let right_start = cell.lo.max(dom.hi);
        if cell.hi > right_start {
            pieces.push(Interval {
                lo: right_start,
                hi: cell.hi,
            });
        }
        Ok(pieces)
    }
}
