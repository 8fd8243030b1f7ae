//! Grids, contact Hamiltonians and their Lagrangians.

pub mod grid;
pub mod hamiltonian;
pub mod lagrangian;
pub mod trig;

pub use grid::{TorusGrid1D, VelocityGrid};
pub use hamiltonian::{
    verify_h3, ContactHamiltonian, HamiltonianPartials, MechanicalContact, MonotonicityReport, TabulatedHamiltonian,
    UForm,
};
pub use lagrangian::{Evaluation, LagrangianPartials, LagrangianView};
pub use trig::{PiecewiseTrig, Profile, TrigPoly};
