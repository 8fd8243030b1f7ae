//! Lagrangian side of the Fenchel-Legendre duality.

use crate::error::{Error, Result};

use super::hamiltonian::ContactHamiltonian;

/// Default Fenchel tolerance used by the duality checks.
pub const TOL_FENCHEL: f64 = 1e-6;

/// How `L` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    /// `L = v^2/2 - V(x) - alpha(x) f(u)`; only valid for mechanical Hamiltonians.
    ClosedForm,
    /// `L = max_p (p v - H)` by a grid scan over `4 m` momenta on
    /// `[-2 v_max, 2 v_max]` followed by golden-section refinement.
    Numeric { v_max: f64, m_nodes: usize },
}

/// `L`, `dL/dv`, `dL/dx`, `dL/du` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianPartials {
    pub value: f64,
    pub dv: f64,
    pub dx: f64,
    pub du: f64,
}

/// Lagrangian attached to a contact Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct LagrangianView<'a> {
    ham: &'a ContactHamiltonian,
    eval: Evaluation,
}

impl<'a> LagrangianView<'a> {
    /// Closed form for mechanical Hamiltonians, numeric Fenchel otherwise.
    pub fn new(ham: &'a ContactHamiltonian, v_max: f64, m_nodes: usize) -> Self {
        let eval = match ham {
            ContactHamiltonian::Mechanical(_) => Evaluation::ClosedForm,
            ContactHamiltonian::Tabulated(_) => Evaluation::Numeric { v_max, m_nodes },
        };
        Self { ham, eval }
    }

    pub fn with_evaluation(ham: &'a ContactHamiltonian, eval: Evaluation) -> Result<Self> {
        if eval == Evaluation::ClosedForm && ham.as_mechanical().is_none() {
            return Err(Error::Unsupported("closed-form Lagrangian needs a mechanical Hamiltonian".into()));
        }
        Ok(Self { ham, eval })
    }

    pub fn hamiltonian(&self) -> &'a ContactHamiltonian {
        self.ham
    }

    pub fn evaluation(&self) -> Evaluation {
        self.eval
    }

    pub fn value(&self, x: f64, v: f64, u: f64) -> Result<f64> {
        Ok(self.partials(x, v, u)?.value)
    }

    pub fn partials(&self, x: f64, v: f64, u: f64) -> Result<LagrangianPartials> {
        match self.eval {
            Evaluation::ClosedForm => {
                let m = self.ham.as_mechanical().expect("checked at construction");
                let x = super::grid::wrap(x, m.period);
                let alpha = m.coupling.value(x);
                let f = m.u_form.value(u);
                Ok(LagrangianPartials {
                    value: 0.5 * v * v - m.potential.value(x) - alpha * f,
                    dv: v,
                    dx: -m.potential.derivative(x) - m.coupling.derivative(x) * f,
                    du: -alpha * m.u_form.derivative(u),
                })
            }
            Evaluation::Numeric { v_max, m_nodes } => {
                let (p, value) = fenchel_max(|p| Ok(p * v - self.ham.value(x, p, u)?), 2.0 * v_max, 4 * m_nodes)
                    .map_err(|e| match e {
                        Error::Coverage { .. } => Error::Coverage { x, v },
                        other => other,
                    })?;
                // Envelope theorem: derivatives of max_p (p v - H) at the maximizer.
                let d = self.ham.partials(x, p, u)?;
                Ok(LagrangianPartials { value, dv: p, dx: -d.dx, du: -d.du })
            }
        }
    }

    /// Legendre map `v -> p = dL/dv`.
    pub fn momentum(&self, x: f64, v: f64, u: f64) -> Result<f64> {
        Ok(self.partials(x, v, u)?.dv)
    }
}

/// Maximizes a concave `g` over `[-half_width, half_width]`: grid scan with
/// `n` samples, then golden-section search on the bracketing cells.
/// Returns `(argmax, max)`; a maximizer on the scan boundary is a coverage error.
pub fn fenchel_max(g: impl Fn(f64) -> Result<f64>, half_width: f64, n: usize) -> Result<(f64, f64)> {
    let n = n.max(8);
    let step = 2.0 * half_width / (n - 1) as f64;
    let at = |k: usize| -half_width + k as f64 * step;
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..n {
        let val = g(at(k))?;
        if val > best.1 {
            best = (k, val);
        }
    }
    if best.0 == 0 || best.0 == n - 1 {
        return Err(Error::Coverage { x: f64::NAN, v: f64::NAN });
    }
    let (mut a, mut b) = (at(best.0 - 1), at(best.0 + 1));
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while (b - a) > 1e-10 * (1.0 + half_width) {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d)?;
        }
    }
    let p = 0.5 * (a + b);
    let val = g(p)?.max(best.1);
    Ok((p, val))
}
