//! Contact Hamilton and contact Euler-Lagrange equations, fixed-step RK4.

use crate::error::{Error, Result};
use crate::model::{grid::wrap, ContactHamiltonian, MechanicalContact};

/// Trajectories stop once `|p|` (or `|v|`) or `|u|` exceeds this.
pub const BLOW_UP: f64 = 1e8;
/// Largest accepted step.
pub const MAX_DT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `y` is the momentum `p`.
    Hamiltonian,
    /// `y` is the velocity `v`.
    Lagrangian,
}

/// `(x, p, u)` or `(x, v, u)` depending on the side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, u: f64) -> Self {
        Self { x, y, u }
    }

    fn axpy(&self, k: f64, d: &PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + k * d.x, self.y + k * d.y, self.u + k * d.u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub side: Side,
    pub samples: Vec<PhasePoint>,
    pub blew_up: bool,
}

impl Trajectory {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn last(&self) -> PhasePoint {
        *self.samples.last().expect("trajectories hold the start point")
    }

    /// Rows `(t, x, p or v, u, H, -dH/du)`; on the Lagrangian side `H` and
    /// the multiplier are evaluated at the Legendre-dual momentum.
    pub fn rows(&self, ham: &ContactHamiltonian) -> Result<Vec<[f64; 6]>> {
        self.samples
            .iter()
            .enumerate()
            .map(|(k, s)| {
                // Lagrangian trajectories only exist for quadratic kinetic
                // energy, where p = v.
                let d = ham.partials(s.x, s.y, s.u)?;
                Ok([self.time(k), s.x, s.y, s.u, d.value, -d.du])
            })
            .collect()
    }
}

/// Vector field of the `c`-shifted contact Hamilton equations.
pub fn contact_field(ham: &ContactHamiltonian, c: f64, s: &PhasePoint) -> Result<PhasePoint> {
    let d = ham.partials(s.x, s.y, s.u)?;
    Ok(PhasePoint::new(d.dp, -d.dx - d.du * s.y, s.y * d.dp - d.value + c))
}

/// Vector field of the contact Euler-Lagrange equations of a mechanical
/// Hamiltonian, `L = v^2/2 - V - alpha f(u)`.
pub fn el_field(m: &MechanicalContact, c: f64, s: &PhasePoint) -> PhasePoint {
    let x = wrap(s.x, m.period);
    let (v, u) = (s.y, s.u);
    let alpha = m.coupling.value(x);
    let f = m.u_form.value(u);
    let lx = -m.potential.derivative(x) - m.coupling.derivative(x) * f;
    let lu = -alpha * m.u_form.derivative(u);
    let l = 0.5 * v * v - m.potential.value(x) - alpha * f;
    PhasePoint::new(v, lx + lu * v, l + c)
}

/// One classical RK4 step.
pub fn rk4_step(field: &dyn Fn(&PhasePoint) -> Result<PhasePoint>, s: &PhasePoint, dt: f64) -> Result<PhasePoint> {
    let k1 = field(s)?;
    let k2 = field(&s.axpy(0.5 * dt, &k1))?;
    let k3 = field(&s.axpy(0.5 * dt, &k2))?;
    let k4 = field(&s.axpy(dt, &k3))?;
    Ok(PhasePoint::new(
        s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
    ))
}

fn integrate(
    field: &dyn Fn(&PhasePoint) -> Result<PhasePoint>,
    period: f64,
    start: PhasePoint,
    t_end: f64,
    dt: f64,
    side: Side,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::OutOfRange { what: "integration step", value: dt, lo: 0.0, hi: MAX_DT });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Precondition(format!("bad horizon {t_end}")));
    }
    if ![start.x, start.y, start.u].iter().all(|v| v.is_finite()) {
        return Err(Error::Precondition("non-finite start point".into()));
    }
    let steps = (t_end / dt).round() as usize;
    let mut s = PhasePoint::new(wrap(start.x, period), start.y, start.u);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(s);
    let mut blew_up = false;
    for _ in 0..steps {
        let next = rk4_step(field, &s, dt)?;
        if !(next.y.abs() <= BLOW_UP && next.u.abs() <= BLOW_UP && next.x.is_finite()) {
            blew_up = true;
            break;
        }
        s = PhasePoint::new(wrap(next.x, period), next.y, next.u);
        samples.push(s);
    }
    Ok(Trajectory { dt, side, samples, blew_up })
}

/// RK4 trajectory of `x' = H_p, p' = -H_x - H_u p, u' = p H_p - H + c`.
pub fn integrate_contact(
    ham: &ContactHamiltonian,
    c: f64,
    start: PhasePoint,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let field = |s: &PhasePoint| contact_field(ham, c, s);
    integrate(&field, ham.period(), start, t_end, dt, Side::Hamiltonian)
}

/// RK4 trajectory of `d/dt L_v = L_x + L_u L_v, u' = L + c`.
pub fn integrate_el(ham: &ContactHamiltonian, c: f64, start: PhasePoint, t_end: f64, dt: f64) -> Result<Trajectory> {
    let m = ham
        .as_mechanical()
        .ok_or_else(|| Error::Unsupported("Euler-Lagrange flow needs a mechanical Hamiltonian".into()))?;
    let field = |s: &PhasePoint| Ok(el_field(m, c, s));
    integrate(&field, ham.period(), start, t_end, dt, Side::Lagrangian)
}

/// `|one step of dt - two steps of dt/2|` in the max norm, positions compared
/// on the universal cover.
pub fn step_defect(ham: &ContactHamiltonian, c: f64, side: Side, s: &PhasePoint, dt: f64) -> Result<f64> {
    let mech = ham.as_mechanical();
    let field = |p: &PhasePoint| match side {
        Side::Hamiltonian => contact_field(ham, c, p),
        Side::Lagrangian => mech
            .map(|m| el_field(m, c, p))
            .ok_or_else(|| Error::Unsupported("Euler-Lagrange flow needs a mechanical Hamiltonian".into())),
    };
    let full = rk4_step(&field, s, dt)?;
    let half = rk4_step(&field, &rk4_step(&field, s, 0.5 * dt)?, 0.5 * dt)?;
    Ok((full.x - half.x).abs().max((full.y - half.y).abs()).max((full.u - half.u).abs()))
}
