use crate::error::{Error, Result};
use crate::model::TorusGrid1D;

/// Real values at the nodes of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid1D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TorusGrid1D, k: f64) -> Self {
        Self { grid, values: vec![k; grid.len()] }
    }

    pub fn from_fn(grid: TorusGrid1D, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, values: grid.nodes().map(f).collect() }
    }

    pub fn grid(&self) -> &TorusGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i % self.values.len()]
    }

    /// Backward difference `(u_i - u_{i-1}) / h`.
    pub fn d_minus(&self, i: usize) -> f64 {
        (self.get(i) - self.values[self.grid.shift(i, -1)]) / self.grid.h()
    }

    /// Forward difference `(u_{i+1} - u_i) / h`.
    pub fn d_plus(&self, i: usize) -> f64 {
        (self.values[self.grid.shift(i, 1)] - self.get(i)) / self.grid.h()
    }

    /// Discrete Lipschitz constant `max_i |u_{i+1} - u_i| / h`.
    pub fn lip(&self) -> f64 {
        (0..self.len()).map(|i| self.d_plus(i).abs()).fold(0.0, f64::max)
    }

    /// Periodic linear interpolation.
    pub fn interpolate(&self, x: f64) -> f64 {
        let (i, w) = self.grid.locate(x);
        let j = self.grid.shift(i, 1);
        (1.0 - w) * self.values[i] + w * self.values[j]
    }

    pub fn sup_dist(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("grids differ: {:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}
