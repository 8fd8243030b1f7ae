//! Closed-form and semi-analytic solutions of the two worked examples.

use std::f64::consts::PI;

use anyhow::{bail, ensure, Result};
use contact_weakkam::model::TorusGrid1D;
use contact_weakkam::weakkam::GridFunction;

/// `u_lambda` solving `H(x, u', u) = 0` for the pendulum preset, `lambda >= 0`.
pub fn u_lambda(x: f64, lambda: f64) -> f64 {
    let x = x.rem_euclid(1.0);
    let c = (PI * x).cos() / PI;
    if x < 0.5 {
        1.0 - (c + lambda).powi(2)
    } else {
        1.0 - (lambda - c).powi(2)
    }
}

pub fn family_member(grid: TorusGrid1D, lambda: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| u_lambda(x, lambda))
}

/// Parameter of the family member through `u(0)`.
pub fn lambda_from_origin(u_at_0: f64) -> f64 {
    (1.0 - u_at_0).max(0.0).sqrt() - 1.0 / PI
}

/// Sign of the square root in `g' = +-sqrt(2(1 - cos 2 pi x) - 2(1 + cos 2 pi x) g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }

    /// Curvature `k` of `g ~ k (x - 1)^2` at `x = 1`: the root of
    /// `k^2 + k = pi^2` whose sign matches the branch.
    pub fn curvature(self) -> f64 {
        let d = (1.0 + 4.0 * PI * PI).sqrt();
        match self {
            Branch::Plus => -0.5 * (1.0 + d),
            Branch::Minus => 0.5 * (d - 1.0),
        }
    }
}

/// Offset from `x = 1` where the integration starts.
pub const G_START_OFFSET: f64 = 1e-3;
/// Negative radicands above `-RADICAND_TOL` are roundoff and clamped to 0.
pub const RADICAND_TOL: f64 = 1e-10;

fn radicand(x: f64, g: f64) -> f64 {
    let c = (2.0 * PI * x).cos();
    2.0 * (1.0 - c) - 2.0 * (1.0 + c) * g
}

/// `g` on `[1/2, 1]` with `g(1) = 0`.
#[derive(Debug, Clone)]
pub struct GBranch {
    pub branch: Branch,
    pub k: f64,
    /// Descending from `1 - G_START_OFFSET` to `1/2`.
    xs: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
}

/// Integrates the branch backward from `1 - G_START_OFFSET` to `1/2` by RK4
/// with steps of at most `dt_ode`.
pub fn g_branch(branch: Branch, dt_ode: f64) -> Result<GBranch> {
    ensure!(dt_ode > 0.0 && dt_ode <= 1e-4, "dt_ode must lie in (0, 1e-4], got {dt_ode}");
    let k = branch.curvature();
    let s = branch.sign();
    let field = |x: f64, g: f64| -> Result<f64> {
        let r = radicand(x, g);
        if r < -RADICAND_TOL {
            bail!("radicand {r:.3e} < 0 at x = {x} on the {} branch", branch.name());
        }
        Ok(s * r.max(0.0).sqrt())
    };
    let x0 = 1.0 - G_START_OFFSET;
    let len = x0 - 0.5;
    let n = (len / dt_ode).ceil() as usize;
    let h = -len / n as f64;
    let mut xs = Vec::with_capacity(n + 1);
    let mut g = Vec::with_capacity(n + 1);
    let mut dg = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (x0, k * G_START_OFFSET * G_START_OFFSET);
    for step in 0..=n {
        xs.push(x);
        g.push(y);
        dg.push(field(x, y)?);
        if step == n {
            break;
        }
        let k1 = field(x, y)?;
        let k2 = field(x + 0.5 * h, y + 0.5 * h * k1)?;
        let k3 = field(x + 0.5 * h, y + 0.5 * h * k2)?;
        let k4 = field(x + h, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = if step + 1 == n { 0.5 } else { x0 + (step + 1) as f64 * h };
    }
    Ok(GBranch { branch, k, xs, g, dg })
}

impl GBranch {
    /// `g(x)` for `x` in `[1/2, 1]`: cubic Hermite between RK4 nodes, the
    /// quadratic ansatz beyond the start point.
    pub fn value(&self, x: f64) -> f64 {
        let x0 = self.xs[0];
        if x >= x0 {
            return self.k * (x - 1.0).powi(2);
        }
        let step = self.xs[0] - self.xs[1];
        let j = (((x0 - x) / step).floor() as usize).min(self.xs.len() - 2);
        let (xa, xb) = (self.xs[j + 1], self.xs[j]);
        let w = xb - xa;
        let t = (x - xa) / w;
        let (ya, yb, da, db) = (self.g[j + 1], self.g[j], self.dg[j + 1] * w, self.dg[j] * w);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * ya + (t3 - 2.0 * t2 + t) * da + (-2.0 * t3 + 3.0 * t2) * yb + (t3 - t2) * db
    }

    pub fn at_half(&self) -> f64 {
        *self.g.last().expect("nonempty")
    }

    pub fn slope_at_half(&self) -> f64 {
        *self.dg.last().expect("nonempty")
    }

    /// `n + 1` equally spaced samples `(x, g(x))` over `[1/2, 1]`.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|i| {
                let x = 0.5 + 0.5 * i as f64 / n as f64;
                (x, self.value(x))
            })
            .collect()
    }

    /// The solution on the circle of length 2 built from this branch:
    /// `g` on `[1/2, 1]`, its reflection `g(2 - x)` on `[1, 3/2]`, and the
    /// free arcs `g(1/2) -+ 2 cos(pi x) / pi` elsewhere (`-` for the plus
    /// branch).
    pub fn assemble(&self, grid: TorusGrid1D) -> Result<GridFunction> {
        ensure!(grid.period() == 2.0, "the assembled solution lives on the circle of length 2");
        let g_half = self.at_half();
        let s = self.branch.sign();
        Ok(GridFunction::from_fn(grid, |x| {
            let x = x.rem_euclid(2.0);
            if (0.5..=1.0).contains(&x) {
                self.value(x)
            } else if x > 1.0 && x <= 1.5 {
                self.value(2.0 - x)
            } else {
                g_half - s * 2.0 * (PI * x).cos() / PI
            }
        }))
    }
}
