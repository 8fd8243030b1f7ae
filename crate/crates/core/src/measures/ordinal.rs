//! Ordinal test `int dL/du dmu = 0`.

use crate::error::{Error, Result};
use crate::model::{LagrangianView, TorusGrid1D};
use crate::weakkam::GridFunction;

use super::measure::DiscreteMeasure;

/// Floor of the ordinal threshold.
pub const EPS_ORDINAL_FLOOR: f64 = 1e-3;

/// The `u` argument of `dL/du`.
#[derive(Debug, Clone, Copy)]
pub enum UArg<'a> {
    Constant(f64),
    Function(&'a GridFunction),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrdinalReport {
    pub integral_dul: f64,
    pub is_ordinal: bool,
    pub eps_ordinal: f64,
}

pub fn ordinal_classify(
    mu: &DiscreteMeasure,
    view: &LagrangianView<'_>,
    u_arg: UArg<'_>,
    eps_ordinal: f64,
) -> Result<OrdinalReport> {
    if let UArg::Function(u) = u_arg {
        if u.grid() != mu.grid() {
            return Err(Error::GridMismatch("u and measure on different grids".into()));
        }
    }
    let grid = *mu.grid();
    let m = mu.vgrid().len();
    let mut integral = 0.0;
    for (k, &w) in mu.masses().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let (i, j) = (k / m, k % m);
        let u = match u_arg {
            UArg::Constant(t) => t,
            UArg::Function(f) => f.get(i),
        };
        integral += w * view.partials(grid.node(i), mu.vgrid().node(j), u)?.du;
    }
    Ok(OrdinalReport { integral_dul: integral, is_ordinal: integral.abs() <= eps_ordinal, eps_ordinal })
}

/// `max(1e-3, 10 (h + dt) sup |d^2 L / du^2|)`, the second derivative taken
/// by central differences at `theta` over the grid nodes and velocities.
pub fn default_eps_ordinal(
    view: &LagrangianView<'_>,
    grid: &TorusGrid1D,
    velocities: &[f64],
    dt: f64,
    theta: f64,
) -> Result<f64> {
    let curvature = match view.hamiltonian().as_mechanical() {
        Some(m) => {
            let f2 = m.u_form.second_derivative(theta).abs();
            let amax = grid.nodes().map(|x| m.coupling.value(x).abs()).fold(0.0, f64::max);
            f2 * amax
        }
        None => {
            let e = 1e-3;
            let mut sup = 0.0f64;
            for x in grid.nodes() {
                for &v in velocities {
                    let a = view.value(x, v, theta - e)?;
                    let b = view.value(x, v, theta)?;
                    let c = view.value(x, v, theta + e)?;
                    sup = sup.max(((a - 2.0 * b + c) / (e * e)).abs());
                }
            }
            sup
        }
    };
    Ok(EPS_ORDINAL_FLOOR.max(10.0 * (grid.h() + dt) * curvature))
}
