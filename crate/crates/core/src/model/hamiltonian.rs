//! Contact Hamiltonians `H(x, p, u)` on the circle.

use crate::error::{Error, Result};

use super::grid::wrap;
use super::trig::{Piece, PiecewiseTrig, Profile, TrigPoly};

/// Relative step of the centered differences used for tabulated partials.
pub const FD_STEP: f64 = 1e-6;

/// Monotone dependence of the coupling term on `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UForm {
    /// `f(u) = u`
    Linear,
    /// `f(u) = u - u0`
    Affine { u0: f64 },
}

impl UForm {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            UForm::Linear => u,
            UForm::Affine { u0 } => u - u0,
        }
    }

    pub fn derivative(&self, _u: f64) -> f64 {
        1.0
    }

    pub fn second_derivative(&self, _u: f64) -> f64 {
        0.0
    }
}

/// `H(x, p, u) = p^2/2 + V(x) + alpha(x) f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanicalContact {
    pub period: f64,
    pub potential: Profile,
    pub coupling: Profile,
    pub u_form: UForm,
}

/// Value and first partials of `H` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianPartials {
    pub value: f64,
    pub dp: f64,
    pub dx: f64,
    pub du: f64,
}

impl MechanicalContact {
    pub fn new(period: f64, potential: Profile, coupling: Profile, u_form: UForm) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidHamiltonian(format!("bad period {period}")));
        }
        for (name, prof) in [("potential", &potential), ("coupling", &coupling)] {
            match prof {
                Profile::Trig(p) if !p.is_periodic(period) => {
                    return Err(Error::InvalidHamiltonian(format!("{name} is not {period}-periodic")))
                }
                Profile::Piecewise(p) if p.period() != period => {
                    return Err(Error::InvalidHamiltonian(format!(
                        "{name} pieces cover period {} instead of {period}",
                        p.period()
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { period, potential, coupling, u_form })
    }

    pub fn value(&self, x: f64, p: f64, u: f64) -> f64 {
        let x = wrap(x, self.period);
        0.5 * p * p + self.potential.value(x) + self.coupling.value(x) * self.u_form.value(u)
    }

    pub fn partials(&self, x: f64, p: f64, u: f64) -> HamiltonianPartials {
        let x = wrap(x, self.period);
        let alpha = self.coupling.value(x);
        let f = self.u_form.value(u);
        HamiltonianPartials {
            value: 0.5 * p * p + self.potential.value(x) + alpha * f,
            dp: p,
            dx: self.potential.derivative(x) + self.coupling.derivative(x) * f,
            du: alpha * self.u_form.derivative(u),
        }
    }

    /// Potential of the Hamiltonian frozen at `u = theta`: `V + alpha f(theta)`.
    pub fn frozen_potential(&self, x: f64, theta: f64) -> f64 {
        self.potential.value(x) + self.coupling.value(x) * self.u_form.value(theta)
    }
}

/// `H` sampled on a periodic `x` grid times `p` and `u` ranges, interpolated
/// multilinearly. Queries beyond the `p` range extrapolate linearly; queries
/// beyond the `u` range are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedHamiltonian {
    period: f64,
    n_x: usize,
    p_range: (f64, f64),
    n_p: usize,
    u_range: (f64, f64),
    n_u: usize,
    /// Indexed `[(ix * n_p + ip) * n_u + iu]`.
    values: Vec<f64>,
}

impl TabulatedHamiltonian {
    pub fn new(
        period: f64,
        n_x: usize,
        p_range: (f64, f64),
        n_p: usize,
        u_range: (f64, f64),
        n_u: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_x < 4 || n_p < 3 || n_u < 2 {
            return Err(Error::InvalidHamiltonian("table too small".into()));
        }
        if values.len() != n_x * n_p * n_u {
            return Err(Error::InvalidHamiltonian(format!(
                "expected {} table values, got {}",
                n_x * n_p * n_u,
                values.len()
            )));
        }
        if !(p_range.0 < p_range.1 && u_range.0 < u_range.1) {
            return Err(Error::InvalidHamiltonian("empty p or u range".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidHamiltonian("non-finite table value".into()));
        }
        Ok(Self { period, n_x, p_range, n_p, u_range, n_u, values })
    }

    /// Tabulates `f` on the given sample grids.
    pub fn from_fn(
        period: f64,
        n_x: usize,
        p_range: (f64, f64),
        n_p: usize,
        u_range: (f64, f64),
        n_u: usize,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(n_x * n_p * n_u);
        for ix in 0..n_x {
            let x = ix as f64 * period / n_x as f64;
            for ip in 0..n_p {
                let p = p_range.0 + (p_range.1 - p_range.0) * ip as f64 / (n_p - 1) as f64;
                for iu in 0..n_u {
                    let u = u_range.0 + (u_range.1 - u_range.0) * iu as f64 / (n_u - 1) as f64;
                    values.push(f(x, p, u));
                }
            }
        }
        Self::new(period, n_x, p_range, n_p, u_range, n_u, values)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    fn at(&self, ix: usize, ip: usize, iu: usize) -> f64 {
        self.values[(ix * self.n_p + ip) * self.n_u + iu]
    }

    pub fn value(&self, x: f64, p: f64, u: f64) -> Result<f64> {
        let (u_lo, u_hi) = self.u_range;
        if !(u >= u_lo && u <= u_hi) {
            return Err(Error::OutOfRange { what: "u", value: u, lo: u_lo, hi: u_hi });
        }
        let tx = wrap(x, self.period) / self.period * self.n_x as f64;
        let ix0 = (tx.floor() as usize).min(self.n_x - 1);
        let wx = tx - ix0 as f64;
        let ix1 = (ix0 + 1) % self.n_x;

        // Extrapolating in p keeps the end segments' slopes.
        let tp = (p - self.p_range.0) / (self.p_range.1 - self.p_range.0) * (self.n_p - 1) as f64;
        let ip0 = (tp.floor().max(0.0) as usize).min(self.n_p - 2);
        let wp = tp - ip0 as f64;

        let tu = (u - u_lo) / (u_hi - u_lo) * (self.n_u - 1) as f64;
        let iu0 = (tu.floor() as usize).min(self.n_u - 2);
        let wu = tu - iu0 as f64;

        let mut acc = 0.0;
        for (ix, fx) in [(ix0, 1.0 - wx), (ix1, wx)] {
            for (ip, fp) in [(ip0, 1.0 - wp), (ip0 + 1, wp)] {
                for (iu, fu) in [(iu0, 1.0 - wu), (iu0 + 1, wu)] {
                    acc += fx * fp * fu * self.at(ix, ip, iu);
                }
            }
        }
        Ok(acc)
    }

    pub fn partials(&self, x: f64, p: f64, u: f64) -> Result<HamiltonianPartials> {
        let value = self.value(x, p, u)?;
        let step = |s: f64| FD_STEP * s.abs().max(1.0);
        let (ex, ep, eu) = (step(x), step(p), step(u));
        let dx = (self.value(x + ex, p, u)? - self.value(x - ex, p, u)?) / (2.0 * ex);
        let dp = (self.value(x, p + ep, u)? - self.value(x, p - ep, u)?) / (2.0 * ep);
        let (u_lo, u_hi) = self.u_range;
        // One-sided at the ends of the u range.
        let (ua, ub) = ((u - eu).max(u_lo), (u + eu).min(u_hi));
        let du = (self.value(x, p, ub)? - self.value(x, p, ua)?) / (ub - ua);
        Ok(HamiltonianPartials { value, dp, dx, du })
    }
}

/// A contact Hamiltonian satisfying convexity and superlinearity in `p`
/// and monotonicity in `u`.
#[derive(Debug, Clone, PartialEq)]
pub enum ContactHamiltonian {
    Mechanical(MechanicalContact),
    Tabulated(TabulatedHamiltonian),
}

impl ContactHamiltonian {
    pub fn period(&self) -> f64 {
        match self {
            ContactHamiltonian::Mechanical(m) => m.period,
            ContactHamiltonian::Tabulated(t) => t.period(),
        }
    }

    pub fn value(&self, x: f64, p: f64, u: f64) -> Result<f64> {
        match self {
            ContactHamiltonian::Mechanical(m) => Ok(m.value(x, p, u)),
            ContactHamiltonian::Tabulated(t) => t.value(x, p, u),
        }
    }

    pub fn partials(&self, x: f64, p: f64, u: f64) -> Result<HamiltonianPartials> {
        match self {
            ContactHamiltonian::Mechanical(m) => Ok(m.partials(x, p, u)),
            ContactHamiltonian::Tabulated(t) => t.partials(x, p, u),
        }
    }

    pub fn as_mechanical(&self) -> Option<&MechanicalContact> {
        match self {
            ContactHamiltonian::Mechanical(m) => Some(m),
            ContactHamiltonian::Tabulated(_) => None,
        }
    }

    /// True when `H` does not depend on `u`.
    pub fn is_u_independent(&self) -> bool {
        match self {
            ContactHamiltonian::Mechanical(m) => m.coupling.is_zero(),
            ContactHamiltonian::Tabulated(_) => false,
        }
    }

    /// `H(x,p,u) = p^2/2 + cos 2 pi x - 1 + (1 - cos 2 pi x) u` on the unit circle.
    pub fn pendulum_example() -> Self {
        ContactHamiltonian::Mechanical(MechanicalContact {
            period: 1.0,
            potential: pendulum_potential().into(),
            coupling: TrigPoly::cosine(1.0, -1.0, 1.0).into(),
            u_form: UForm::Linear,
        })
    }

    /// Same kinetic and potential terms on the circle of length 2, coupled
    /// through `alpha = 1 + cos 2 pi x` on `[1/2, 3/2)` and `0` elsewhere.
    pub fn piecewise_example() -> Self {
        let bump = TrigPoly::cosine(1.0, 1.0, 1.0);
        let coupling = PiecewiseTrig::new(
            2.0,
            vec![
                Piece { start: 0.0, end: 0.5, poly: TrigPoly::zero() },
                Piece { start: 0.5, end: 1.5, poly: bump },
                Piece { start: 1.5, end: 2.0, poly: TrigPoly::zero() },
            ],
        )
        .expect("preset coupling is continuous");
        ContactHamiltonian::Mechanical(MechanicalContact {
            period: 2.0,
            potential: pendulum_potential().into(),
            coupling: coupling.into(),
            u_form: UForm::Linear,
        })
    }

    /// `H = p^2/2 + cos 2 pi x - 1`, independent of `u`.
    pub fn classical_pendulum() -> Self {
        ContactHamiltonian::Mechanical(MechanicalContact {
            period: 1.0,
            potential: pendulum_potential().into(),
            coupling: TrigPoly::zero().into(),
            u_form: UForm::Linear,
        })
    }

    /// `H = p^2/2`.
    pub fn free_particle() -> Self {
        ContactHamiltonian::Mechanical(MechanicalContact {
            period: 1.0,
            potential: TrigPoly::zero().into(),
            coupling: TrigPoly::zero().into(),
            u_form: UForm::Linear,
        })
    }

    /// `H = p^2/2 + u`, strictly increasing in `u`.
    pub fn discounted_free() -> Self {
        ContactHamiltonian::Mechanical(MechanicalContact {
            period: 1.0,
            potential: TrigPoly::zero().into(),
            coupling: TrigPoly::constant(1.0).into(),
            u_form: UForm::Linear,
        })
    }

    /// Looks a preset up by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "pendulum_example" => Some(Self::pendulum_example()),
            "piecewise_example" => Some(Self::piecewise_example()),
            "classical_pendulum" => Some(Self::classical_pendulum()),
            "free_particle" => Some(Self::free_particle()),
            "discounted_free" => Some(Self::discounted_free()),
            _ => None,
        }
    }

    /// Positions of rest points a discretization should resolve exactly.
    pub fn equilibria(&self) -> Vec<f64> {
        match self {
            ContactHamiltonian::Mechanical(m) => {
                let mut pts = vec![0.0];
                let mut x = 0.5;
                while x < m.period {
                    pts.push(x);
                    x += 0.5;
                }
                pts
            }
            ContactHamiltonian::Tabulated(_) => Vec::new(),
        }
    }
}

/// Names accepted by [`ContactHamiltonian::preset`].
pub const PRESETS: &[&str] =
    &["pendulum_example", "piecewise_example", "classical_pendulum", "free_particle", "discounted_free"];

fn pendulum_potential() -> TrigPoly {
    TrigPoly::cosine(-1.0, 1.0, 1.0)
}

/// Outcome of the monotonicity-in-`u` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub passed: bool,
    pub min_slope: f64,
    pub argmin_x: f64,
    pub argmin_u: f64,
}

/// Smallest difference quotient `(H(u2) - H(u1)) / (u2 - u1)` allowed to pass.
pub const TOL_MONO: f64 = 1e-10;

/// Samples `H` over `x`, `p` and consecutive `u` pairs and reports the
/// smallest difference quotient in `u`.
pub fn verify_h3(
    ham: &ContactHamiltonian,
    x_samples: usize,
    u_samples: usize,
    u_range: (f64, f64),
) -> Result<MonotonicityReport> {
    if x_samples < 16 || u_samples < 16 {
        return Err(Error::Precondition("need at least 16 x and u samples".into()));
    }
    let period = ham.period();
    let p_samples = [-2.0, -0.5, 0.0, 0.5, 2.0];
    let mut report = MonotonicityReport { passed: true, min_slope: f64::INFINITY, argmin_x: 0.0, argmin_u: 0.0 };
    for ix in 0..x_samples {
        let x = ix as f64 * period / x_samples as f64;
        for &p in &p_samples {
            for iu in 0..u_samples - 1 {
                let lerp = |k: usize| u_range.0 + (u_range.1 - u_range.0) * k as f64 / (u_samples - 1) as f64;
                let (u1, u2) = (lerp(iu), lerp(iu + 1));
                let slope = (ham.value(x, p, u2)? - ham.value(x, p, u1)?) / (u2 - u1);
                if slope < report.min_slope {
                    report.min_slope = slope;
                    report.argmin_x = x;
                    report.argmin_u = u1;
                }
            }
        }
    }
    report.passed = report.min_slope >= -TOL_MONO;
    Ok(report)
}
