//! Time averages along backward curves.

use crate::error::{Error, Result};
use crate::model::{TorusGrid1D, VelocityGrid};
use crate::weakkam::CalibratedCurve;

use super::measure::DiscreteMeasure;

/// Occupation measure of the part of `curve` that lies between `a` and `b`
/// time units before its endpoint. Positions are split linearly between the
/// two neighbouring nodes of `grid`, velocities go to the nearest node.
pub fn occupation_measure(
    curve: &CalibratedCurve,
    a: f64,
    b: f64,
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    tol_closed: f64,
) -> Result<DiscreteMeasure> {
    let dt = curve.dt;
    if !(a >= 0.0 && b - a >= 10.0 * dt) {
        return Err(Error::Precondition(format!("window [{a}, {b}] shorter than 10 dt = {}", 10.0 * dt)));
    }
    if b > curve.horizon + 1e-9 {
        return Err(Error::Precondition(format!("window end {b} beyond the horizon {}", curve.horizon)));
    }
    let m = vgrid.len();
    let mut weights = vec![0.0; grid.len() * m];
    let w = dt / (b - a);
    for (k, &(x, v)) in curve.samples.iter().enumerate() {
        let tau = k as f64 * dt;
        if tau < a - 1e-12 || tau >= b - 1e-12 {
            continue;
        }
        let j = vgrid.nearest(v).ok_or(Error::Coverage { x, v })?;
        let (i, frac) = grid.locate(x);
        weights[i * m + j] += w * (1.0 - frac);
        weights[grid.shift(i, 1) * m + j] += w * frac;
    }
    DiscreteMeasure::normalized(grid, vgrid, weights, tol_closed)
}
