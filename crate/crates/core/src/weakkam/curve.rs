//! Backward calibrated curves read off the argmin chain of a fixed point.

use crate::error::{Error, Result};
use crate::model::ContactHamiltonian;

use super::grid_function::GridFunction;
use super::operator::{Coupling, Discretization, LaxOleinik};

/// A discrete backward curve ending at `samples[0].0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedCurve {
    pub horizon: f64,
    pub dt: f64,
    /// `(x_k, v_k)` ordered backward in time. `v_k` is the forward-time
    /// velocity of the step that arrives at `x_k`.
    pub samples: Vec<(f64, f64)>,
    /// Grid nodes of the samples, one more than `samples` (the last is the
    /// departure point of the oldest step).
    pub nodes: Vec<usize>,
    /// `|u(x_end) - u(x_start) - sum dt (L + c)|`.
    pub defect: f64,
    /// Allowed defect per unit time, `5 (h + dt)`.
    pub tol_cal: f64,
}

impl CalibratedCurve {
    pub fn is_calibrated(&self) -> bool {
        self.defect <= self.tol_cal * self.horizon
    }

    /// Position reached at the far end of the chain.
    pub fn origin(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(f64::NAN)
    }
}

/// Follows the minimizers of one Lax-Oleinik step at `u` backward for
/// `n_steps` from the node nearest `x0`.
///
/// `u` has to be a fixed point up to `tol_pre` per unit time:
/// `sup |T[u] - u| <= tol_pre * dt`.
pub fn backward_curve(
    ham: &ContactHamiltonian,
    u: &GridFunction,
    c: f64,
    disc: Discretization,
    x0: f64,
    n_steps: usize,
    tol_pre: f64,
) -> Result<CalibratedCurve> {
    let op = LaxOleinik::new(ham, disc, Coupling::Contact)?;
    let step = op.step(u, c)?;
    let defect_rate = step.values.sup_dist(u)? / disc.dt;
    if !(defect_rate <= tol_pre) {
        return Err(Error::Precondition(format!(
            "not a fixed point: sup |T[u] - u| / dt = {defect_rate:.3e} > {tol_pre:.3e}"
        )));
    }
    let grid = disc.grid;
    let mut i = grid.nearest_node(x0);
    let end_value = u.get(i);
    let mut cost = 0.0;
    let mut samples = Vec::with_capacity(n_steps);
    let mut nodes = Vec::with_capacity(n_steps + 1);
    nodes.push(i);
    for _ in 0..n_steps {
        let s = step.argmin[i];
        samples.push((grid.node(i), disc.velocity(s)));
        cost += op.move_cost(u, i, s, c)?;
        i = grid.shift(i, -s);
        nodes.push(i);
    }
    let defect = (end_value - u.get(i) - cost).abs();
    Ok(CalibratedCurve {
        horizon: n_steps as f64 * disc.dt,
        dt: disc.dt,
        samples,
        nodes,
        defect,
        tol_cal: 5.0 * disc.resolution(),
    })
}
