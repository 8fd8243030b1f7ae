use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("query outside tabulated range: {what} = {value} not in [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("fenchel maximizer on the boundary of the sample grid at x = {x}, v = {v}; enlarge the grid")]
    Coverage { x: f64, v: f64 },
    #[error("CFL condition violated: dt * sup|du L| = {0} > 1")]
    Cfl(f64),
    #[error("no grid node reachable in one step: dt * v_max = {reach} < h = {h}")]
    EmptyReach { reach: f64, h: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("drift did not stabilize (spread {spread:.3e} over the last half); increase the iteration count")]
    NeedsMoreIterations { spread: f64 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
