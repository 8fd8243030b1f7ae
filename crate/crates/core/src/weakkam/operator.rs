//! One step of the discrete Lax-Oleinik semigroup.
//!
//! For a node `x_i` the step minimizes over departure nodes `y = x_{i-s}`
//! with `|s| <= K`, `K = floor(dt v_max / h)`:
//!
//! ```text
//! T[u](x_i) = min_s  u(y) + dt * (L(y, s h / dt, u(y)) + c)
//! ```
//!
//! The `u` argument of `L` is frozen at the departure node, which keeps the
//! operator monotone as long as `dt * sup |dL/du| <= 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ContactHamiltonian, LagrangianView, TorusGrid1D, UForm, VelocityGrid};

use super::grid_function::GridFunction;

/// Below this node count the step runs sequentially.
const PAR_THRESHOLD: usize = 256;

/// Space, velocity and time steps of the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub grid: TorusGrid1D,
    pub vgrid: VelocityGrid,
    pub dt: f64,
}

impl Discretization {
    pub fn new(grid: TorusGrid1D, vgrid: VelocityGrid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { grid, vgrid, dt })
    }

    /// Time step whose one-step displacements `s h / dt` are exactly the
    /// nodes of `vgrid`: `dt = (m - 1)/2 * h / v_max`.
    pub fn matched(grid: TorusGrid1D, vgrid: VelocityGrid) -> Self {
        let half = (vgrid.len() - 1) / 2;
        let dt = half as f64 * grid.h() / vgrid.v_max();
        Self { grid, vgrid, dt }
    }

    /// Largest reachable node offset `K`.
    pub fn reach(&self) -> usize {
        (self.dt * self.vgrid.v_max() / self.grid.h() + 1e-9).floor() as usize
    }

    /// Velocity of a step with node offset `s`.
    pub fn velocity(&self, s: isize) -> f64 {
        s as f64 * self.grid.h() / self.dt
    }

    /// `h + dt`, the scale of the scheme's consistency error.
    pub fn resolution(&self) -> f64 {
        self.grid.h() + self.dt
    }
}

/// Where the `u` argument of the Lagrangian comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `L(y, v, u(y))`: the contact operator.
    Contact,
    /// `L(y, v, theta)`: the classical operator of the frozen Hamiltonian.
    Frozen(f64),
}

enum Kernel {
    /// Mechanical Hamiltonians: the candidate from `y` is
    /// `slope[y] * u(y) + shift[y] + kinetic[s]`.
    Separable {
        slope: Vec<f64>,
        shift: Vec<f64>,
        kinetic: Vec<f64>,
    },
    Generic,
}

/// Result of one step: new values and the minimizing offsets.
#[derive(Debug, Clone)]
pub struct Step {
    pub values: GridFunction,
    /// Offset `s` of the minimizing departure node `x_{i-s}`.
    pub argmin: Vec<isize>,
}

/// The discrete Lax-Oleinik operator for a fixed Hamiltonian, grid and `dt`.
pub struct LaxOleinik<'a> {
    view: LagrangianView<'a>,
    disc: Discretization,
    coupling: Coupling,
    reach: usize,
    kernel: Kernel,
    /// Offsets in tie-breaking order `0, 1, -1, 2, -2, ...`.
    offsets: Vec<isize>,
}

impl<'a> LaxOleinik<'a> {
    pub fn new(ham: &'a ContactHamiltonian, disc: Discretization, coupling: Coupling) -> Result<Self> {
        let view = LagrangianView::new(ham, disc.vgrid.v_max(), disc.vgrid.len());
        Self::with_view(view, disc, coupling)
    }

    pub fn with_view(view: LagrangianView<'a>, disc: Discretization, coupling: Coupling) -> Result<Self> {
        let ham = view.hamiltonian();
        if (ham.period() - disc.grid.period()).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "hamiltonian period {} vs grid period {}",
                ham.period(),
                disc.grid.period()
            )));
        }
        let reach = disc.reach();
        if reach == 0 {
            return Err(Error::EmptyReach { reach: disc.dt * disc.vgrid.v_max(), h: disc.grid.h() });
        }
        if reach >= disc.grid.len() / 2 {
            return Err(Error::Precondition(format!("one step reaches {reach} nodes, more than half the circle")));
        }
        let mut offsets = vec![0isize];
        for s in 1..=reach as isize {
            offsets.push(s);
            offsets.push(-s);
        }
        let dt = disc.dt;
        let kernel = match (view.evaluation(), ham.as_mechanical()) {
            (crate::model::Evaluation::ClosedForm, Some(m)) => {
                let n = disc.grid.len();
                let mut slope = Vec::with_capacity(n);
                let mut shift = Vec::with_capacity(n);
                let mut sup_du = 0.0f64;
                for y in disc.grid.nodes() {
                    let alpha = m.coupling.value(y);
                    let pot = m.potential.value(y);
                    match coupling {
                        Coupling::Frozen(theta) => {
                            slope.push(1.0);
                            shift.push(-dt * (pot + alpha * m.u_form.value(theta)));
                        }
                        Coupling::Contact => {
                            // L = v^2/2 - V - alpha f(u), f affine with unit slope.
                            let du = alpha * m.u_form.derivative(0.0);
                            sup_du = sup_du.max(du.abs());
                            slope.push(1.0 - dt * du);
                            let u0 = match m.u_form {
                                UForm::Linear => 0.0,
                                UForm::Affine { u0 } => u0,
                            };
                            shift.push(-dt * pot + dt * alpha * u0);
                        }
                    }
                }
                if dt * sup_du > 1.0 {
                    return Err(Error::Cfl(dt * sup_du));
                }
                let kinetic = (-(reach as isize)..=reach as isize)
                    .map(|s| {
                        let v = disc.velocity(s);
                        0.5 * dt * v * v
                    })
                    .collect();
                Kernel::Separable { slope, shift, kinetic }
            }
            _ => Kernel::Generic,
        };
        Ok(Self { view, disc, coupling, reach, kernel, offsets })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn view(&self) -> &LagrangianView<'a> {
        &self.view
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Applies the operator with right-hand side `c`.
    pub fn step(&self, u: &GridFunction, c: f64) -> Result<Step> {
        if u.grid() != &self.disc.grid {
            return Err(Error::GridMismatch("iterate lives on another grid".into()));
        }
        let n = self.disc.grid.len();
        let dt = self.disc.dt;
        let uv = u.values();
        let k = self.reach as isize;
        let (values, argmin): (Vec<f64>, Vec<isize>) = match &self.kernel {
            Kernel::Separable { slope, shift, kinetic } => {
                // The step cost from y only depends on y through `base[y]`.
                let dtc = dt * c;
                let base: Vec<f64> = (0..n).map(|y| slope[y] * uv[y] + (shift[y] + dtc)).collect();
                let node = |i: usize| {
                    let mut best = (f64::INFINITY, 0isize);
                    for &s in &self.offsets {
                        let y = self.disc.grid.shift(i, -s);
                        let cand = base[y] + kinetic[(s + k) as usize];
                        if cand < best.0 {
                            best = (cand, s);
                        }
                    }
                    best
                };
                if n >= PAR_THRESHOLD {
                    (0..n).into_par_iter().with_min_len(64).map(node).unzip()
                } else {
                    (0..n).map(node).unzip()
                }
            }
            Kernel::Generic => {
                if let Coupling::Contact = self.coupling {
                    let mut sup_du = 0.0f64;
                    for (y, &uy) in uv.iter().enumerate() {
                        let d = self.view.partials(self.disc.grid.node(y), 0.0, uy)?;
                        sup_du = sup_du.max(d.du.abs());
                    }
                    if dt * sup_du > 1.0 {
                        return Err(Error::Cfl(dt * sup_du));
                    }
                }
                let node = |i: usize| -> Result<(f64, isize)> {
                    let mut best = (f64::INFINITY, 0isize);
                    for &s in &self.offsets {
                        let y = self.disc.grid.shift(i, -s);
                        let uy = uv[y];
                        let arg = match self.coupling {
                            Coupling::Contact => uy,
                            Coupling::Frozen(theta) => theta,
                        };
                        let l = self.view.value(self.disc.grid.node(y), self.disc.velocity(s), arg)?;
                        let cand = uy + dt * (l + c);
                        if cand < best.0 {
                            best = (cand, s);
                        }
                    }
                    Ok(best)
                };
                let pairs: Result<Vec<(f64, isize)>> = if n >= PAR_THRESHOLD {
                    (0..n).into_par_iter().map(node).collect()
                } else {
                    (0..n).map(node).collect()
                };
                pairs?.into_iter().unzip()
            }
        };
        Ok(Step { values: GridFunction::new(self.disc.grid, values)?, argmin })
    }

    /// Step cost `dt * (L(y, v, u(y)) + c)` of the move arriving at node `i`
    /// with offset `s`, for calibration bookkeeping.
    pub fn move_cost(&self, u: &GridFunction, i: usize, s: isize, c: f64) -> Result<f64> {
        let y = self.disc.grid.shift(i, -s);
        let arg = match self.coupling {
            Coupling::Contact => u.get(y),
            Coupling::Frozen(theta) => theta,
        };
        let l = self.view.value(self.disc.grid.node(y), self.disc.velocity(s), arg)?;
        Ok(self.disc.dt * (l + c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: usize) -> Discretization {
        Discretization::matched(TorusGrid1D::new(1.0, n).unwrap(), VelocityGrid::new(4.0, 65).unwrap())
    }

    #[test]
    fn matched_dt_reaches_velocity_nodes() {
        let d = disc(512);
        assert_eq!(d.reach(), 32);
        assert!((d.dt - 1.0 / 64.0).abs() < 1e-15);
        assert!((d.velocity(32) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn free_particle_rest_is_optimal() {
        let h = ContactHamiltonian::free_particle();
        let d = disc(128);
        let op = LaxOleinik::new(&h, d, Coupling::Contact).unwrap();
        let u = GridFunction::constant(d.grid, 0.0);
        let s = op.step(&u, 0.0).unwrap();
        assert!(s.values.values().iter().all(|&v| v == 0.0));
        assert!(s.argmin.iter().all(|&s| s == 0));
        let s = op.step(&u, 1.0).unwrap();
        assert!(s.values.values().iter().all(|&v| (v - d.dt).abs() < 1e-15));
    }

    #[test]
    fn empty_reach_and_cfl_errors() {
        let h = ContactHamiltonian::free_particle();
        let g = TorusGrid1D::new(1.0, 64).unwrap();
        let vg = VelocityGrid::new(4.0, 65).unwrap();
        let d = Discretization::new(g, vg, 0.5 * g.h() / 4.0).unwrap();
        assert!(matches!(LaxOleinik::new(&h, d, Coupling::Contact), Err(Error::EmptyReach { .. })));

        let steep = ContactHamiltonian::Mechanical(
            crate::model::MechanicalContact::new(
                1.0,
                crate::model::TrigPoly::zero().into(),
                crate::model::TrigPoly::constant(100.0).into(),
                UForm::Linear,
            )
            .unwrap(),
        );
        let d = Discretization::matched(g, VelocityGrid::new(4.0, 17).unwrap());
        assert!(matches!(LaxOleinik::new(&steep, d, Coupling::Contact), Err(Error::Cfl(_))));
    }

    #[test]
    fn generic_kernel_agrees_with_separable() {
        let h = ContactHamiltonian::pendulum_example();
        let d = Discretization::matched(TorusGrid1D::new(1.0, 32).unwrap(), VelocityGrid::new(2.0, 9).unwrap());
        let fast = LaxOleinik::new(&h, d, Coupling::Contact).unwrap();
        let numeric =
            LagrangianView::with_evaluation(&h, crate::model::Evaluation::Numeric { v_max: 2.0, m_nodes: 9 }).unwrap();
        let slow = LaxOleinik::with_view(numeric, d, Coupling::Contact).unwrap();
        let u = GridFunction::from_fn(d.grid, |x| 0.3 * (6.0 * x).sin());
        let a = fast.step(&u, 0.1).unwrap();
        let b = slow.step(&u, 0.1).unwrap();
        assert!(a.values.sup_dist(&b.values).unwrap() < 1e-8);
    }
}
