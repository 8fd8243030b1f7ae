//! Discrete Lax-Oleinik dynamic programming for `H(x, u', u) = c`.

pub mod critical;
pub mod curve;
pub mod grid_function;
pub mod operator;
pub mod residual;
pub mod solve;

pub use critical::{admissible_interval_probe, frozen_critical_value, ProbeOutcome, ProbeReport};
pub use curve::{backward_curve, CalibratedCurve};
pub use grid_function::GridFunction;
pub use operator::{Coupling, Discretization, LaxOleinik, Step};
pub use residual::{residual, ResidualReport};
pub use solve::{explore_multiplicity, solve_stationary, LadderSolution, SolveOptions, SolveReport, SolveStatus};
