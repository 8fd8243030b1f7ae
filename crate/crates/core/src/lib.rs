//! Numerical weak KAM toolkit for contact Hamilton-Jacobi equations
//! `H(x, u'(x), u(x)) = c` on the circle.
//!
//! * [`model`]: grids, contact Hamiltonians, Lagrangians.
//! * [`weakkam`]: discrete Lax-Oleinik operator, stationary solutions,
//!   critical values, backward calibrated curves, residuals.
//! * [`measures`]: closed measures by linear programming, occupation
//!   measures, ordinal classification, comparison of solutions.
//! * [`flows`]: contact Hamilton and Euler-Lagrange integrators and the
//!   invariance check of the Mather set.
//! * [`ccurve`]: scans of `theta -> c(theta)` and their structural checks.

pub mod ccurve;
pub mod error;
pub mod flows;
pub mod measures;
pub mod model;
pub mod weakkam;

pub use error::{Error, Result};
