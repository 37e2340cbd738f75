use crate::banded::SymBanded;
use crate::fem1d::AssembledSystem;
use crate::integrator::{SimConfig, SimState};
use crate::lognonlin::{depth_lower_bound, log_integral, GridFunction};

/// Energy decomposition of one state.
///
/// `e = kinetic + dirichlet + mass − log_term + gamma_term`,
/// `e_pen = e + penalty`, `e_plus = e_pen + log_term`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyReport {
    pub t: f64,
    /// `½‖u'‖²`
    pub kinetic: f64,
    /// `½‖∇u‖²`
    pub dirichlet: f64,
    /// `(b/2)‖u‖²`
    pub mass: f64,
    /// `½∫u² ln|u|^γ`
    pub log_term: f64,
    /// `(γ/4)‖u‖²`
    pub gamma_term: f64,
    /// `(1/2ε)‖χu‖²`
    pub penalty: f64,
    pub e: f64,
    pub e_pen: f64,
    pub e_plus: f64,
    pub i1: f64,
    pub j1: f64,
    pub in_well: bool,
    /// `‖u‖²`
    pub l2sq: f64,
    /// `‖χu‖²`
    pub chi_l2sq: f64,
}

pub fn energy_report(
    state: &SimState,
    sys: &AssembledSystem,
    penalty: &SymBanded,
    cfg: &SimConfig,
) -> EnergyReport {
    let g = &state.g;
    let grad2 = sys.stiffness.quad_form(g);
    let l2sq = sys.mass.quad_form(g);
    let chi_l2sq = penalty.quad_form(g);
    let u = GridFunction::new(&sys.mesh, g).expect("state matches its system");
    let log_int = log_integral(u, cfg.gamma);

    let kinetic = 0.5 * sys.mass.quad_form(&state.v);
    let dirichlet = 0.5 * grad2;
    let mass = 0.5 * cfg.b * l2sq;
    let log_term = 0.5 * log_int;
    let gamma_term = 0.25 * cfg.gamma * l2sq;
    let pen = chi_l2sq / (2.0 * cfg.epsilon);
    let e = kinetic + dirichlet + mass - log_term + gamma_term;
    let e_pen = e + pen;
    let i1 = grad2 - log_int;
    let j1 = 0.5 * grad2 - 0.5 * log_int + gamma_term;
    let in_well = u.is_zero() || (j1 < depth_lower_bound(cfg.gamma) && i1 > 0.0);
    EnergyReport {
        t: state.t,
        kinetic,
        dirichlet,
        mass,
        log_term,
        gamma_term,
        penalty: pen,
        e,
        e_pen,
        e_plus: e_pen + log_term,
        i1,
        j1,
        in_well,
        l2sq,
        chi_l2sq,
    }
}
