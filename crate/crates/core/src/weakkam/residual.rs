//! Upwind residual of `H(x, u', u) = c` on the grid.

use crate::error::Result;
use crate::model::ContactHamiltonian;

use super::grid_function::GridFunction;

/// Kinks are nodes where the one-sided slopes differ by more than
/// `KINK_FACTOR * h * lip(u)`.
pub const KINK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Signed residual with the larger magnitude of the two one-sided tests.
    pub values: GridFunction,
    /// One-sided difference that produced `values`.
    pub du_upwind: Vec<f64>,
    pub kinks: Vec<bool>,
    pub sup_excluding_kinks: f64,
    /// Node attaining `sup_excluding_kinks`.
    pub argmax: usize,
}

impl ResidualReport {
    pub fn kink_nodes(&self) -> Vec<usize> {
        (0..self.kinks.len()).filter(|&i| self.kinks[i]).collect()
    }

    /// Sup-norm over nodes farther than `radius` from every point in `exclude`.
    pub fn sup_away_from(&self, exclude: &[f64], radius: f64) -> f64 {
        let grid = self.values.grid();
        (0..grid.len())
            .filter(|&i| !self.kinks[i])
            .filter(|&i| exclude.iter().all(|&z| grid.dist(grid.node(i), z) > radius))
            .map(|i| self.values.get(i).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates `r_i = H(x_i, D u_i, u_i) - c` with `D` the backward or forward
/// difference, whichever gives the larger `|r_i|`.
pub fn residual(ham: &ContactHamiltonian, u: &GridFunction, c: f64) -> Result<ResidualReport> {
    let grid = *u.grid();
    let threshold = KINK_FACTOR * grid.h() * u.lip();
    let n = u.len();
    let mut values = Vec::with_capacity(n);
    let mut du_upwind = Vec::with_capacity(n);
    let mut kinks = Vec::with_capacity(n);
    let (mut sup, mut argmax) = (0.0f64, 0usize);
    for i in 0..n {
        let x = grid.node(i);
        let (dm, dp) = (u.d_minus(i), u.d_plus(i));
        let rm = ham.value(x, dm, u.get(i))? - c;
        let rp = ham.value(x, dp, u.get(i))? - c;
        let (r, d) = if rm.abs() >= rp.abs() { (rm, dm) } else { (rp, dp) };
        let kink = (dm - dp).abs() > threshold;
        values.push(r);
        du_upwind.push(d);
        kinks.push(kink);
        if !kink && r.abs() > sup {
            sup = r.abs();
            argmax = i;
        }
    }
    Ok(ResidualReport { values: GridFunction::new(grid, values)?, du_upwind, kinks, sup_excluding_kinks: sup, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TorusGrid1D;

    #[test]
    fn zero_function_on_pendulum() {
        let h = ContactHamiltonian::pendulum_example();
        let g = TorusGrid1D::new(1.0, 512).unwrap();
        let r = residual(&h, &GridFunction::constant(g, 0.0), 0.0).unwrap();
        assert!((r.sup_excluding_kinks - 2.0).abs() < 1e-12);
        assert_eq!(r.argmax, 256);
        assert!((r.values.get(256) + 2.0).abs() < 1e-12);
    }
}
