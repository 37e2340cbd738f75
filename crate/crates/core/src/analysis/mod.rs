//! Functionals along trajectories, the functional inequalities behind the
//! decay argument, and decay-rate fitting.

mod decay;
mod energy;
mod inequalities;
mod residual;

pub use decay::{fit_decay, fit_decay_series, unit_samples, DecayFit};
pub use energy::{energy_report, EnergyReport};
pub use inequalities::{
    golden_section_min, gronwall_self_consistency, log_gronwall_bound, log_sobolev_slack,
    nakao_constants, nakao_contraction, nakao_difference_check, optimal_delta, DeltaChoice,
    DeltaSource, NakaoCheck, NakaoConstants, DELTA_CROSS_CHECK_TOL,
};
pub use residual::{weak_residual, SeparableBump, SpaceTimeTest};
