//! Minimizing closed measures by linear programming.

use crate::error::{Error, Result};
use crate::model::{LagrangianView, TorusGrid1D, VelocityGrid};

use super::lp::StandardLp;
use super::measure::{DiscreteMeasure, DEFAULT_TOL_CLOSED};

/// Simplex iteration cap for one solve.
pub const LP_MAX_ITER: usize = 500_000;
/// Cells with less mass are not part of the support when enumerating.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ClosedMeasureSolution {
    /// `-min sum L mu`.
    pub critical_value: f64,
    pub measure: DiscreteMeasure,
    pub iterations: usize,
}

/// Cells of the LP, with an optional cell mask.
struct Layout {
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    cells: Vec<(usize, usize)>,
}

impl Layout {
    fn new(grid: TorusGrid1D, vgrid: VelocityGrid, excluded: &[(usize, usize)]) -> Self {
        let m = vgrid.len();
        let mut keep = vec![true; grid.len() * m];
        for &(i, j) in excluded {
            keep[i * m + j] = false;
        }
        let cells = (0..grid.len() * m).filter(|&k| keep[k]).map(|k| (k / m, k % m)).collect();
        Self { grid, vgrid, cells }
    }

    /// Unit mass row 0, closedness rows for the hat functions `1..n`
    /// (the one at node 0 is implied by the others), then rows with the
    /// given right-hand sides.
    fn program(&self, extra: &[f64]) -> StandardLp {
        let mut rhs = vec![0.0; self.grid.len()];
        rhs[0] = 1.0;
        rhs.extend_from_slice(extra);
        StandardLp::new(rhs)
    }

    fn entries(&self, cell: (usize, usize), out: &mut Vec<(usize, f64)>) {
        let (i, j) = cell;
        let v = self.vgrid.node(j);
        out.clear();
        out.push((0, 1.0));
        // Cell i contributes +v to the hat at i+1 and -v to the hat at i-1.
        let up = self.grid.shift(i, 1);
        let down = self.grid.shift(i, -1);
        if up != 0 {
            out.push((up, v));
        }
        if down != 0 {
            out.push((down, -v));
        }
    }

    fn measure(&self, x: &[f64]) -> Result<DiscreteMeasure> {
        let m = self.vgrid.len();
        let mut masses = vec![0.0; self.grid.len() * m];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            masses[i * m + j] = x[k];
        }
        DiscreteMeasure::normalized(self.grid, self.vgrid, masses, DEFAULT_TOL_CLOSED)
    }
}

fn lagrangian_costs(view: &LagrangianView<'_>, theta: f64, layout: &Layout) -> Result<Vec<f64>> {
    layout.cells.iter().map(|&(i, j)| view.value(layout.grid.node(i), layout.vgrid.node(j), theta)).collect()
}

/// Minimizes `sum L(x_i, v_j, theta) mu_ij` over closed probability
/// measures on the grid.
pub fn closed_measure_lp(
    view: &LagrangianView<'_>,
    theta: f64,
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
) -> Result<ClosedMeasureSolution> {
    closed_measure_lp_excluding(view, theta, grid, vgrid, &[])
}

/// As [`closed_measure_lp`] with the mass of the listed cells forced to zero.
pub fn closed_measure_lp_excluding(
    view: &LagrangianView<'_>,
    theta: f64,
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    excluded: &[(usize, usize)],
) -> Result<ClosedMeasureSolution> {
    check_period(view, &grid)?;
    let layout = Layout::new(grid, vgrid, excluded);
    let costs = lagrangian_costs(view, theta, &layout)?;
    let mut lp = layout.program(&[]);
    let mut col = Vec::new();
    for (k, &cell) in layout.cells.iter().enumerate() {
        layout.entries(cell, &mut col);
        lp.add_column(costs[k], &col);
    }
    let sol = lp.solve(LP_MAX_ITER)?;
    Ok(ClosedMeasureSolution {
        critical_value: -sol.objective + 0.0,
        measure: layout.measure(&sol.x)?,
        iterations: sol.iterations,
    })
}

fn check_period(view: &LagrangianView<'_>, grid: &TorusGrid1D) -> Result<()> {
    let p = view.hamiltonian().period();
    if (p - grid.period()).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!("hamiltonian period {p} vs grid period {}", grid.period())));
    }
    Ok(())
}

/// Optimal vertices found by excluding the support of every earlier one and
/// re-solving, as long as the optimal value stays within `tol_value` of the
/// first.
pub fn enumerate_mather_measures(
    view: &LagrangianView<'_>,
    theta: f64,
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    max_count: usize,
    tol_value: f64,
) -> Result<Vec<ClosedMeasureSolution>> {
    let first = closed_measure_lp(view, theta, grid, vgrid)?;
    let best = first.critical_value;
    let mut excluded = first.measure.support(SUPPORT_THRESHOLD);
    let mut found = vec![first];
    while found.len() < max_count {
        let next = match closed_measure_lp_excluding(view, theta, grid, vgrid, &excluded) {
            Ok(s) => s,
            Err(Error::Infeasible) => break,
            Err(e) => return Err(e),
        };
        if (next.critical_value - best).abs() > tol_value {
            break;
        }
        excluded.extend(next.measure.support(SUPPORT_THRESHOLD));
        found.push(next);
    }
    Ok(found)
}

/// Extremes of `int dH/du dmu` over the near-optimal face
/// `{mu closed : sum L mu <= optimum + tol_face}`.
#[derive(Debug, Clone)]
pub struct FaceRange {
    pub min: f64,
    pub max: f64,
    pub argmin: DiscreteMeasure,
    pub argmax: DiscreteMeasure,
}

/// `optimum` is the minimal value `sum L mu` (minus the critical value).
pub fn face_integral_range(
    view: &LagrangianView<'_>,
    theta: f64,
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    optimum: f64,
    tol_face: f64,
) -> Result<FaceRange> {
    check_period(view, &grid)?;
    let layout = Layout::new(grid, vgrid, &[]);
    let n = grid.len();
    let mut lagr = Vec::with_capacity(layout.cells.len());
    let mut du_h = Vec::with_capacity(layout.cells.len());
    for &(i, j) in &layout.cells {
        let p = view.partials(grid.node(i), vgrid.node(j), theta)?;
        lagr.push(p.value);
        // dH/du at the Legendre-dual momentum is -dL/du.
        du_h.push(-p.du);
    }
    let solve = |sign: f64| -> Result<(f64, DiscreteMeasure)> {
        let mut lp = layout.program(&[optimum + tol_face]);
        let mut col = Vec::new();
        for (k, &cell) in layout.cells.iter().enumerate() {
            layout.entries(cell, &mut col);
            col.push((n, lagr[k]));
            lp.add_column(sign * du_h[k], &col);
        }
        // Slack of the face constraint.
        lp.add_column(0.0, &[(n, 1.0)]);
        let sol = lp.solve(LP_MAX_ITER)?;
        let x = &sol.x[..layout.cells.len()];
        let value = x.iter().zip(&du_h).map(|(a, b)| a * b).sum::<f64>() / x.iter().sum::<f64>();
        Ok((value, layout.measure(x)?))
    };
    let (min, argmin) = solve(1.0)?;
    let (max, argmax) = solve(-1.0)?;
    Ok(FaceRange { min, max, argmin, argmax })
}
