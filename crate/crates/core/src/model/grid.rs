//! Periodic position grid and symmetric velocity grid.

use crate::error::{Error, Result};

/// Minimum node count accepted for a position grid.
pub const MIN_NODES: usize = 16;

/// Uniform grid on the circle `R / period Z` with nodes `x_i = i * period / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid1D {
    period: f64,
    n_nodes: usize,
}

impl TorusGrid1D {
    pub fn new(period: f64, n_nodes: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if n_nodes < MIN_NODES {
            return Err(Error::InvalidGrid(format!("need at least {MIN_NODES} nodes, got {n_nodes}")));
        }
        Ok(Self { period, n_nodes })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.n_nodes == 0
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        self.period / self.n_nodes as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i % self.n_nodes) as f64 * self.period / self.n_nodes as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes).map(move |i| self.node(i))
    }

    /// Index of the node `i + offset` modulo `n`.
    pub fn shift(&self, i: usize, offset: isize) -> usize {
        let n = self.n_nodes as isize;
        (i as isize + offset).rem_euclid(n) as usize
    }

    /// Reduce `x` into `[0, period)`.
    pub fn wrap(&self, x: f64) -> f64 {
        wrap(x, self.period)
    }

    /// Minimal-image difference `a - b`, in `[-period/2, period/2)`.
    pub fn signed_diff(&self, a: f64, b: f64) -> f64 {
        let d = wrap(a - b, self.period);
        if d >= 0.5 * self.period {
            d - self.period
        } else {
            d
        }
    }

    /// Distance on the circle.
    pub fn dist(&self, a: f64, b: f64) -> f64 {
        self.signed_diff(a, b).abs()
    }

    pub fn nearest_node(&self, x: f64) -> usize {
        let t = self.wrap(x) / self.h();
        (t.round() as usize) % self.n_nodes
    }

    /// Left node index and weight of the right node for linear interpolation at `x`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let t = self.wrap(x) / self.h();
        let i = (t.floor() as usize).min(self.n_nodes - 1);
        let w = (t - i as f64).clamp(0.0, 1.0);
        (i, w)
    }

    /// True when `x` coincides with a node up to `tol`.
    pub fn contains_node(&self, x: f64, tol: f64) -> bool {
        self.dist(x, self.node(self.nearest_node(x))) <= tol
    }
}

/// Reduce `x` into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Uniform velocity nodes on `[-v_max, v_max]`; `m_nodes` is odd so `v = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityGrid {
    v_max: f64,
    m_nodes: usize,
}

impl VelocityGrid {
    pub fn new(v_max: f64, m_nodes: usize) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::InvalidGrid(format!("v_max must be positive, got {v_max}")));
        }
        if m_nodes < 3 || m_nodes % 2 == 0 {
            return Err(Error::InvalidGrid(format!("velocity node count must be odd and >= 3, got {m_nodes}")));
        }
        Ok(Self { v_max, m_nodes })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn len(&self) -> usize {
        self.m_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.v_max / (self.m_nodes - 1) as f64
    }

    /// Index of `v = 0`.
    pub fn zero_index(&self) -> usize {
        self.m_nodes / 2
    }

    pub fn node(&self, j: usize) -> f64 {
        let k = j as isize - self.zero_index() as isize;
        k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m_nodes).map(move |j| self.node(j))
    }

    /// Nearest node to `v`, or `None` when `|v|` exceeds `v_max` by more than half a cell.
    pub fn nearest(&self, v: f64) -> Option<usize> {
        let k = (v / self.spacing()).round();
        let j = k + self.zero_index() as f64;
        if j < 0.0 || j >= self.m_nodes as f64 {
            None
        } else {
            Some(j as usize)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(TorusGrid1D::new(1.0, 8).is_err());
        assert!(TorusGrid1D::new(0.0, 32).is_err());
        assert!(VelocityGrid::new(2.0, 32).is_err());
        assert!(VelocityGrid::new(-1.0, 33).is_err());
    }

    #[test]
    fn wrap_handles_tiny_negative_values() {
        let g = TorusGrid1D::new(1.0, 16).unwrap();
        let w = g.wrap(-1e-20);
        assert!((0.0..1.0).contains(&w));
        assert_eq!(g.wrap(2.25), 0.25);
        assert!((g.signed_diff(0.95, 0.05) + 0.1).abs() < 1e-12);
    }

    #[test]
    fn velocity_grid_contains_zero() {
        let vg = VelocityGrid::new(2.0, 33).unwrap();
        assert_eq!(vg.node(vg.zero_index()), 0.0);
        assert_eq!(vg.node(0), -2.0);
        assert_eq!(vg.node(32), 2.0);
        assert_eq!(vg.nearest(0.01), Some(16));
        assert_eq!(vg.nearest(3.0), None);
    }

    #[test]
    fn grid_nodes_hit_half_period_exactly() {
        let g = TorusGrid1D::new(2.0, 1024).unwrap();
        assert_eq!(g.node(512), 1.0);
        assert_eq!(g.node(256), 0.5);
    }
}
