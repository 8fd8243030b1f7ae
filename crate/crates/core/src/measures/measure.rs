//! Probability measures on the discrete tangent bundle.

use crate::error::{Error, Result};
use crate::model::{TorusGrid1D, VelocityGrid};
use crate::weakkam::GridFunction;

/// Total mass must be one within this.
pub const MASS_TOL: f64 = 1e-9;
/// Default closedness tolerance for measures built from exact constraints.
pub const DEFAULT_TOL_CLOSED: f64 = 1e-6;

/// Masses on the cells `(x_i, v_j)`, stored row-major in `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    grid: TorusGrid1D,
    vgrid: VelocityGrid,
    masses: Vec<f64>,
    tol_closed: f64,
}

impl DiscreteMeasure {
    /// Checks nonnegativity, unit mass and closedness up to `tol_closed`.
    pub fn new(grid: TorusGrid1D, vgrid: VelocityGrid, masses: Vec<f64>, tol_closed: f64) -> Result<Self> {
        if masses.len() != grid.len() * vgrid.len() {
            return Err(Error::GridMismatch(format!(
                "{} masses for a {}x{} grid",
                masses.len(),
                grid.len(),
                vgrid.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Precondition(format!("negative or non-finite mass {m}")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Precondition(format!("total mass {total} is not 1")));
        }
        let mu = Self { grid, vgrid, masses, tol_closed };
        let r = mu.closedness_residual();
        if !(r <= tol_closed) {
            return Err(Error::Precondition(format!("closedness residual {r:.3e} exceeds {tol_closed:.3e}")));
        }
        Ok(mu)
    }

    /// Scales nonnegative weights to unit mass before validating.
    pub fn normalized(grid: TorusGrid1D, vgrid: VelocityGrid, mut weights: Vec<f64>, tol_closed: f64) -> Result<Self> {
        for w in weights.iter_mut() {
            if *w < 0.0 && *w > -1e-12 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Precondition("no mass to normalize".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(grid, vgrid, weights, tol_closed)
    }

    /// Unit mass at the cell nearest `(x, v)`; `v` must round to the zero
    /// velocity for the result to be closed.
    pub fn dirac(grid: TorusGrid1D, vgrid: VelocityGrid, x: f64, v: f64) -> Result<Self> {
        let i = grid.nearest_node(x);
        let j = vgrid.nearest(v).ok_or(Error::Coverage { x, v })?;
        let mut masses = vec![0.0; grid.len() * vgrid.len()];
        masses[i * vgrid.len() + j] = 1.0;
        Self::new(grid, vgrid, masses, DEFAULT_TOL_CLOSED)
    }

    /// `w * self + (1 - w) * other`.
    pub fn mix(&self, w: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.vgrid != other.vgrid {
            return Err(Error::GridMismatch("measures on different grids".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange { what: "mixing weight", value: w, lo: 0.0, hi: 1.0 });
        }
        let masses = self.masses.iter().zip(&other.masses).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        Self::new(self.grid, self.vgrid, masses, self.tol_closed.max(other.tol_closed))
    }

    pub fn grid(&self) -> &TorusGrid1D {
        &self.grid
    }

    pub fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn tol_closed(&self) -> f64 {
        self.tol_closed
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.vgrid.len() + j]
    }

    /// Largest `|int v phi_k'(x) dmu|` over the hat functions `phi_k`, with
    /// `phi_k'` taken as the centered difference.
    pub fn closedness_residual(&self) -> f64 {
        let n = self.grid.len();
        let m = self.vgrid.len();
        let flux: Vec<f64> =
            (0..n).map(|i| (0..m).map(|j| self.masses[i * m + j] * self.vgrid.node(j)).sum()).collect();
        let inv2h = 0.5 / self.grid.h();
        (0..n).map(|k| ((flux[self.grid.shift(k, -1)] - flux[self.grid.shift(k, 1)]) * inv2h).abs()).fold(0.0, f64::max)
    }

    /// `sum f(x_i, v_j) mu_ij`.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let m = self.vgrid.len();
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(k, &w)| w * f(self.grid.node(k / m), self.vgrid.node(k % m)))
            .sum()
    }

    /// Integral of `u(x)` against the x-marginal. A `u` on a different grid
    /// of the same circle is interpolated at the measure's nodes.
    pub fn integrate_x(&self, u: &GridFunction) -> Result<f64> {
        let m = self.vgrid.len();
        if u.grid() == &self.grid {
            return Ok(self.masses.iter().enumerate().map(|(k, &w)| w * u.get(k / m)).sum());
        }
        if u.grid().period() != self.grid.period() {
            return Err(Error::GridMismatch(format!(
                "function on a circle of length {} and measure on {}",
                u.grid().period(),
                self.grid.period()
            )));
        }
        Ok(self
            .masses
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(k, &w)| w * u.interpolate(self.grid.node(k / m)))
            .sum())
    }

    /// Mass within `cells` grid cells of `(x, v)` in both directions.
    pub fn mass_near(&self, x: f64, v: f64, cells: usize) -> f64 {
        let i0 = self.grid.nearest_node(x) as isize;
        let j0 = ((v + self.vgrid.v_max()) / self.vgrid.spacing()).round() as isize;
        let m = self.vgrid.len() as isize;
        let c = cells as isize;
        let mut total = 0.0;
        for di in -c..=c {
            let i = self.grid.shift(i0 as usize, di);
            for j in (j0 - c).max(0)..=(j0 + c).min(m - 1) {
                total += self.mass(i, j as usize);
            }
        }
        total
    }

    /// Cells carrying more than `threshold` mass.
    pub fn support(&self, threshold: f64) -> Vec<(usize, usize)> {
        let m = self.vgrid.len();
        (0..self.masses.len()).filter(|&k| self.masses[k] > threshold).map(|k| (k / m, k % m)).collect()
    }

    /// `(x, v, mass)` for every cell with nonzero mass.
    pub fn nonzero(&self) -> Vec<(f64, f64, f64)> {
        let m = self.vgrid.len();
        (0..self.masses.len())
            .filter(|&k| self.masses[k] != 0.0)
            .map(|k| (self.grid.node(k / m), self.vgrid.node(k % m), self.masses[k]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_rules() {
        let g = TorusGrid1D::new(1.0, 64).unwrap();
        let vg = VelocityGrid::new(2.0, 33).unwrap();
        let d = DiscreteMeasure::dirac(g, vg, 0.0, 0.0).unwrap();
        assert_eq!(d.closedness_residual(), 0.0);
        assert_eq!(d.mass_near(0.0, 0.0, 1), 1.0);
        assert!(DiscreteMeasure::dirac(g, vg, 0.0, 1.0).is_err());
    }
}
