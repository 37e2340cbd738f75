//! Penalized Galerkin simulation of the damped logarithmic wave equation
//!
//! ```text
//! u'' − Δu + au' + bu = u ln|u|^γ   in the expanding domain Ω_t ⊂ Ω ⊂ ℝ
//! ```
//!
//! continued to the fixed cylinder `Ω × (0, T)` by the penalty term `ε⁻¹χu`,
//! together with the potential-well functionals and decay diagnostics used to
//! check the solutions' qualitative behaviour.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod app;
pub mod banded;
pub mod config;
pub mod corpus;
pub mod error;
pub mod fem1d;
pub mod geometry;
pub mod integrator;
pub mod lognonlin;
pub mod quadrature;

pub use banded::SymBanded;
pub use error::{Error, Result};
pub use fem1d::{assemble, assemble_penalty, build_mesh, AssembledSystem, Mesh1D, Projection};
pub use geometry::{BoundaryMotion, Interval, MovingDomainFamily};
pub use integrator::{
    simulate, step, DomainSpec, InitialData, InitialProfile, SimConfig, SimState, Trajectory,
};
pub use lognonlin::GridFunction;
