//! Contact Hamilton and Euler-Lagrange flows and the invariance check of
//! Mather sets.

pub mod invariance;
pub mod ode;

pub use invariance::{mather_invariance_check, InvarianceReport};
pub use ode::{
    contact_field, el_field, integrate_contact, integrate_el, rk4_step, step_defect, PhasePoint, Side, Trajectory,
    BLOW_UP, MAX_DT,
};
