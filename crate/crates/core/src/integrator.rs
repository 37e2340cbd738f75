//! Time stepping of the penalized Galerkin system
//!
//! ```text
//! M g'' + a M g' + (K + bM + ε⁻¹ Mχ(t)) g = N(g)
//! ```
//!
//! by the implicit midpoint rule. The linear part is treated exactly at the
//! midpoint; the logarithmic source uses a pointwise discrete gradient of its
//! potential so that the discrete energy balances to rounding error, and is
//! resolved by Picard iteration. The penalty matrix is reassembled at the
//! midpoint of every step.

use crate::analysis::{energy_report, EnergyReport};
use crate::banded::SymBanded;
use crate::error::{Error, Result};
use crate::fem1d::{
    assemble, assemble_penalty, build_mesh, project_initial, AssembledSystem, Projection,
};
use crate::geometry::{BoundaryMotion, Interval, MovingDomainFamily};
use crate::lognonlin::discrete_gradient_load;

/// Shape of an initial profile on `Ω₀ = (L₀, R₀)`, in terms of `s = (x − L₀)/(R₀ − L₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialProfile {
    Zero,
    /// `A sin(kπs)`.
    Sine {
        amplitude: f64,
        mode: u32,
    },
    /// `A (4s(1 − s))²`.
    Bump {
        amplitude: f64,
    },
}

impl InitialProfile {
    pub fn eval(&self, x: f64, omega0: Interval) -> f64 {
        let s = (x - omega0.lo) / omega0.len();
        match *self {
            InitialProfile::Zero => 0.0,
            InitialProfile::Sine { amplitude, mode } => {
                amplitude * (mode as f64 * std::f64::consts::PI * s).sin()
            }
            InitialProfile::Bump { amplitude } => {
                let b = 4.0 * s * (1.0 - s);
                amplitude * b * b
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub u0: InitialProfile,
    pub u1: InitialProfile,
}

/// Serializable description of the domain family (the horizon comes from [`SimConfig`]).
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub ambient: Interval,
    pub initial: Interval,
    pub motion: BoundaryMotion,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub m: usize,
    /// Requested step; `None` selects `min(h/2, T/2000)`.
    pub dt: Option<f64>,
    pub horizon: f64,
    pub domain: DomainSpec,
    pub initial: InitialData,
    pub picard_iters: usize,
    pub picard_tol: f64,
    pub projection: Projection,
    /// When false the logarithmic source is dropped (linearized runs).
    pub nonlinear: bool,
}

pub const DEFAULT_PICARD_ITERS: usize = 8;
pub const DEFAULT_PICARD_TOL: f64 = 1e-10;

impl SimConfig {
    /// Defaults for everything except the physics that has to be chosen.
    pub fn new(gamma: f64, domain: DomainSpec, initial: InitialData) -> Self {
        SimConfig {
            a: 1.0,
            b: 1.0,
            gamma,
            epsilon: 1e-3,
            m: 100,
            dt: None,
            horizon: 20.0,
            domain,
            initial,
            picard_iters: DEFAULT_PICARD_ITERS,
            picard_tol: DEFAULT_PICARD_TOL,
            projection: Projection::Interp,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive, got {v}")))
            }
        };
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("epsilon", self.epsilon)?;
        positive("T", self.horizon)?;
        positive("picard_tol", self.picard_tol)?;
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Argument(format!(
                "gamma must satisfy 0 < γ < 1, got {}",
                self.gamma
            )));
        }
        if self.m == 0 {
            return Err(Error::Argument("m must be at least 1".into()));
        }
        if self.picard_iters == 0 {
            return Err(Error::Argument("picard_iters must be at least 1".into()));
        }
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
            if dt > self.horizon {
                return Err(Error::Argument(format!(
                    "dt = {dt} exceeds T = {}",
                    self.horizon
                )));
            }
        }
        self.family().map(|_| ())
    }

    pub fn family(&self) -> Result<MovingDomainFamily> {
        MovingDomainFamily::new(
            self.domain.ambient,
            self.domain.initial,
            self.domain.motion.clone(),
            self.horizon,
        )
    }

    pub fn mesh_spacing(&self) -> f64 {
        self.domain.ambient.len() / (self.m + 1) as f64
    }

    /// `(steps, dt)` of the uniform time grid covering `[0, T]`.
    pub fn time_grid(&self) -> (usize, f64) {
        let target = self
            .dt
            .unwrap_or_else(|| (0.5 * self.mesh_spacing()).min(self.horizon / 2000.0));
        let n = ((self.horizon / target) - 1e-9).ceil().max(1.0) as usize;
        (n, self.horizon / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    /// Galerkin coefficients of `u`.
    pub g: Vec<f64>,
    /// Coefficients of `u'`.
    pub v: Vec<f64>,
}

impl SimState {
    pub fn zeros(m: usize) -> Self {
        SimState {
            t: 0.0,
            g: vec![0.0; m],
            v: vec![0.0; m],
        }
    }

    fn is_finite(&self) -> bool {
        self.g.iter().chain(&self.v).all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SimState,
    /// `a·dt·‖v_mid‖²_M` dissipated over the step.
    pub dissipation: f64,
    pub picard_iters: usize,
    pub picard_residual: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// One implicit-midpoint step with the penalty matrix `Mχ` frozen at the midpoint time.
pub fn step(
    state: &SimState,
    sys: &AssembledSystem,
    penalty_mid: &SymBanded,
    cfg: &SimConfig,
) -> Result<StepOutcome> {
    let (_, dt) = cfg.time_grid();
    let m = sys.mesh.m();
    if state.g.len() != m || state.v.len() != m || penalty_mid.dim() != m {
        return Err(Error::Argument(
            "state dimension does not match the system".into(),
        ));
    }
    // A = K + bM + ε⁻¹Mχ,  S = (2/dt² + a/dt) M + A/2
    let a_op =
        sys.stiffness
            .lin_comb(1.0, &sys.mass, cfg.b)
            .lin_comb(1.0, penalty_mid, 1.0 / cfg.epsilon);
    let s_op = sys.mass.lin_comb(2.0 / (dt * dt) + cfg.a / dt, &a_op, 0.5);
    let chol = s_op.cholesky()?;

    // S Δ = (2/dt) M v0 − A g0 + N(g0, g0 + Δ)
    let mv0 = sys.mass.matvec(&state.v);
    let ag0 = a_op.matvec(&state.g);
    let rhs_lin: Vec<f64> = mv0
        .iter()
        .zip(&ag0)
        .map(|(p, q)| 2.0 / dt * p - q)
        .collect();

    let mut delta: Vec<f64> = state.v.iter().map(|v| dt * v).collect();
    let mut iters = 0;
    let mut residual = 0.0;
    if cfg.nonlinear {
        let mut g1 = vec![0.0; m];
        for it in 1..=cfg.picard_iters {
            iters = it;
            for ((out, g), d) in g1.iter_mut().zip(&state.g).zip(&delta) {
                *out = g + d;
            }
            let load = discrete_gradient_load(&sys.mesh, &state.g, &g1, cfg.gamma);
            let mut next: Vec<f64> = rhs_lin.iter().zip(&load).map(|(p, q)| p + q).collect();
            chol.solve_in_place(&mut next);
            let diff: Vec<f64> = next.iter().zip(&delta).map(|(p, q)| p - q).collect();
            residual = norm(&diff) / (norm(&next) + f64::MIN_POSITIVE);
            delta = next;
            if residual <= cfg.picard_tol {
                break;
            }
        }
        if residual > 10.0 * cfg.picard_tol {
            return Err(Error::PicardStall {
                t: state.t,
                residual,
                iters,
            });
        }
    } else {
        iters = 1;
        delta = chol.solve(&rhs_lin);
    }

    let next = SimState {
        t: state.t + dt,
        g: state.g.iter().zip(&delta).map(|(g, d)| g + d).collect(),
        v: state
            .v
            .iter()
            .zip(&delta)
            .map(|(v, d)| 2.0 * d / dt - v)
            .collect(),
    };
    if !next.is_finite() {
        return Err(Error::Divergence {
            t: next.t,
            last: Box::new(state.clone()),
        });
    }
    Ok(StepOutcome {
        state: next,
        dissipation: cfg.a / dt * sys.mass.quad_form(&delta),
        picard_iters: iters,
        picard_residual: residual,
    })
}

#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub state: SimState,
    pub report: EnergyReport,
    /// Damping loss over the step ending here (0 for the initial record).
    pub dissipation: f64,
    pub picard_iters: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SimConfig,
    pub system: AssembledSystem,
    pub dt: f64,
    pub steps: Vec<TrajectoryStep>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.state.t).collect()
    }

    pub fn series(&self, field: impl Fn(&EnergyReport) -> f64) -> Vec<f64> {
        self.steps.iter().map(|s| field(&s.report)).collect()
    }

    /// `max_t ‖χu‖²`.
    pub fn max_penalty_l2sq(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.report.chi_l2sq)
            .fold(0.0, f64::max)
    }

    /// Steps `k` (index of the later state) at which
    /// `E_pen(t_k) + a·dt·‖v_mid‖² > E_pen(t_{k−1}) + rel_tol·(1 + |E_pen(t_{k−1})|)`.
    pub fn dissipation_violations(&self, rel_tol: f64) -> Vec<usize> {
        self.steps
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                let before = w[0].report.e_pen;
                w[1].report.e_pen + w[1].dissipation > before + rel_tol * (1.0 + before.abs())
            })
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// Running maximum of `‖u'‖² + ‖∇u‖² + ‖u‖² + ε⁻¹‖χu‖² + 2a∫‖u'‖²`.
    pub fn apriori_max(&self) -> f64 {
        let mut cumulative = 0.0;
        let mut best: f64 = 0.0;
        for s in &self.steps {
            cumulative += s.dissipation;
            let r = &s.report;
            let sum =
                2.0 * r.kinetic + 2.0 * r.dirichlet + r.l2sq + 2.0 * r.penalty + 2.0 * cumulative;
            best = best.max(sum);
        }
        best
    }

    /// State at time `t`, linearly interpolated between recorded steps.
    pub fn state_at(&self, t: f64) -> SimState {
        let k = ((t / self.dt).floor().max(0.0) as usize).min(self.steps.len() - 1);
        if k + 1 >= self.steps.len() {
            return self.steps[k].state.clone();
        }
        let (s0, s1) = (&self.steps[k].state, &self.steps[k + 1].state);
        let theta = ((t - s0.t) / (s1.t - s0.t)).clamp(0.0, 1.0);
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(p, q)| p + theta * (q - p)).collect()
        };
        SimState {
            t,
            g: mix(&s0.g, &s1.g),
            v: mix(&s0.v, &s1.v),
        }
    }
}

/// Runs the penalized Galerkin system from the projected initial data to `T`.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let fam = cfg.family()?;
    let mesh = build_mesh(fam.ambient(), cfg.m)?;
    let sys = assemble(&mesh);
    let omega0 = fam.initial();
    let u0 = |x: f64| cfg.initial.u0.eval(x, omega0);
    let u1 = |x: f64| cfg.initial.u1.eval(x, omega0);
    let (g0, v0) = project_initial(&u0, &u1, &sys, &fam, cfg.projection)?;
    let (n, dt) = cfg.time_grid();
    let time_at = |k: usize| cfg.horizon * k as f64 / n as f64;

    let mut state = SimState {
        t: 0.0,
        g: g0,
        v: v0,
    };
    let mut steps = Vec::with_capacity(n + 1);
    let pen0 = assemble_penalty(&mesh, &fam, 0.0)?;
    steps.push(TrajectoryStep {
        report: energy_report(&state, &sys, &pen0, cfg),
        state: state.clone(),
        dissipation: 0.0,
        picard_iters: 0,
    });
    for k in 0..n {
        let t_mid = 0.5 * (time_at(k) + time_at(k + 1));
        let pen_mid = assemble_penalty(&mesh, &fam, t_mid)?;
        let out = step(&state, &sys, &pen_mid, cfg)?;
        state = out.state;
        state.t = time_at(k + 1);
        let pen = assemble_penalty(&mesh, &fam, state.t)?;
        steps.push(TrajectoryStep {
            report: energy_report(&state, &sys, &pen, cfg),
            state: state.clone(),
            dissipation: out.dissipation,
            picard_iters: out.picard_iters,
        });
    }
    Ok(Trajectory {
        config: cfg.clone(),
        system: sys,
        dt,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cylinder(m: usize) -> SimConfig {
        let unit = Interval::new(0.0, 1.0).unwrap();
        SimConfig {
            m,
            horizon: 1.0,
            ..SimConfig::new(
                0.5,
                DomainSpec {
                    ambient: unit,
                    initial: unit,
                    motion: BoundaryMotion::Constant,
                },
                InitialData {
                    u0: InitialProfile::Sine {
                        amplitude: 0.1,
                        mode: 1,
                    },
                    u1: InitialProfile::Zero,
                },
            )
        }
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let cfg = cylinder(10);
        let sys = assemble(&build_mesh(cfg.domain.ambient, 10).unwrap());
        let pen = SymBanded::zeros(10, 1);
        let out = step(&SimState::zeros(10), &sys, &pen, &cfg).unwrap();
        assert!(out.state.g.iter().chain(&out.state.v).all(|&c| c == 0.0));
    }

    #[test]
    fn default_time_grid() {
        let mut cfg = cylinder(99);
        cfg.horizon = 20.0;
        let (n, dt) = cfg.time_grid();
        // h = 0.01, so dt = min(0.005, 0.01)
        assert_eq!(n, 4000);
        assert!((dt - 0.005).abs() < 1e-15);
        cfg.dt = Some(0.3);
        cfg.horizon = 1.0;
        let (n, dt) = cfg.time_grid();
        assert_eq!(n, 4);
        assert_eq!(dt, 0.25);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut cfg = cylinder(10);
        cfg.gamma = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = cylinder(10);
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = cylinder(10);
        cfg.dt = Some(2.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn divergence_keeps_last_finite_state() {
        let cfg = cylinder(4);
        let sys = assemble(&build_mesh(cfg.domain.ambient, 4).unwrap());
        let pen = SymBanded::zeros(4, 1);
        let bad = SimState {
            t: 0.0,
            g: vec![0.0; 4],
            v: vec![f64::MAX, 0.0, 0.0, 0.0],
        };
        let mut lin = cfg.clone();
        lin.nonlinear = false;
        match step(&bad, &sys, &pen, &lin) {
            Err(Error::Divergence { last, .. }) => assert_eq!(*last, bad),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn stiff_penalty_suppresses_midpoint_average() {
        // Ω_t = (0, 0.2) fixed; node at 0.8 is deep in the penalized region.
        // Scalar model g'' + g/ε = 0 under implicit midpoint: from rest the
        // step average (g₀ + g₁)/2 equals g₀ / (1 + dt²/(4ε)); afterwards the
        // averages stay below amplitude / sqrt(1 + dt²/(4ε)).
        let unit = Interval::new(0.0, 1.0).unwrap();
        let mut cfg = cylinder(9);
        cfg.domain = DomainSpec {
            ambient: unit,
            initial: Interval::new(0.0, 0.2).unwrap(),
            motion: BoundaryMotion::Constant,
        };
        cfg.epsilon = 1e-6;
        cfg.dt = Some(0.05);
        cfg.nonlinear = false;
        let fam = cfg.family().unwrap();
        let sys = assemble(&build_mesh(unit, 9).unwrap());
        let pen = assemble_penalty(&sys.mesh, &fam, 0.0).unwrap();
        let mut state = SimState::zeros(9);
        state.g[7] = 1.0; // x = 0.8
        let stiff = 0.05f64.powi(2) / (4.0 * 1e-6);
        for k in 0..10 {
            let next = step(&state, &sys, &pen, &cfg).unwrap().state;
            let avg = 0.5 * (state.g[7] + next.g[7]);
            if k == 0 {
                assert!(avg.abs() <= 1e-2, "first-step average {avg}");
                assert!((avg - 1.0 / (1.0 + stiff)).abs() < 0.2 / (1.0 + stiff));
            } else {
                assert!(avg.abs() <= 1.1 / (1.0 + stiff).sqrt(), "step {k}: {avg}");
            }
            state = next;
        }
    }
}
