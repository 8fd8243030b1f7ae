//! Trigonometric polynomials and piecewise-trigonometric profiles in `x`.
//!
//! Phases are reduced before calling `sin`/`cos`, so `sin(2 pi x)` vanishes
//! exactly at half-integers and equilibria of the presets stay equilibria in
//! floating point.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Continuity tolerance at piece breakpoints.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// `sin(pi * t)` with exact zeros at integers and exact `+-1` at half-integers.
pub fn sin_pi(t: f64) -> f64 {
    let n = (2.0 * t).round();
    let r = t - 0.5 * n;
    let y = PI * r;
    match (n as i64).rem_euclid(4) {
        0 => y.sin(),
        1 => y.cos(),
        2 => -y.sin(),
        _ => -y.cos(),
    }
}

/// `cos(pi * t)` with exact zeros at half-integers and exact `+-1` at integers.
pub fn cos_pi(t: f64) -> f64 {
    sin_pi(t + 0.5)
}

/// One Fourier term `a cos(2 pi f x) + b sin(2 pi f x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub freq: f64,
    pub cos: f64,
    pub sin: f64,
}

/// `constant + sum_k (a_k cos(2 pi f_k x) + b_k sin(2 pi f_k x))`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    pub constant: f64,
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `constant + a cos(2 pi f x)`.
    pub fn cosine(constant: f64, amplitude: f64, freq: f64) -> Self {
        Self { constant, terms: vec![TrigTerm { freq, cos: amplitude, sin: 0.0 }] }
    }

    pub fn with_term(mut self, freq: f64, cos: f64, sin: f64) -> Self {
        self.terms.push(TrigTerm { freq, cos, sin });
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, t| {
            let s = 2.0 * t.freq * x;
            acc + t.cos * cos_pi(s) + t.sin * sin_pi(s)
        })
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, t| {
            let s = 2.0 * t.freq * x;
            let w = 2.0 * PI * t.freq;
            acc + w * (t.sin * cos_pi(s) - t.cos * sin_pi(s))
        })
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, t| {
            let s = 2.0 * t.freq * x;
            let w = 2.0 * PI * t.freq;
            acc - w * w * (t.cos * cos_pi(s) + t.sin * sin_pi(s))
        })
    }

    /// True when every frequency is a multiple of `1 / period`.
    pub fn is_periodic(&self, period: f64) -> bool {
        self.terms.iter().all(|t| {
            let k = t.freq * period;
            (k - k.round()).abs() < 1e-9 || (t.cos == 0.0 && t.sin == 0.0)
        })
    }
}

/// A trig polynomial on `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub poly: TrigPoly,
}

/// Trig polynomials glued continuously over a partition of `[0, period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseTrig {
    period: f64,
    pieces: Vec<Piece>,
}

impl PiecewiseTrig {
    /// Pieces must be sorted, contiguous, cover `[0, period)` and agree at
    /// every breakpoint (including the wrap-around at `period`).
    pub fn new(period: f64, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidHamiltonian("piecewise profile without pieces".into()));
        }
        if pieces[0].start != 0.0 || pieces.last().map(|p| p.end) != Some(period) {
            return Err(Error::InvalidHamiltonian(format!("pieces must cover [0, {period})")));
        }
        for w in pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::InvalidHamiltonian(format!(
                    "gap between pieces at {} and {}",
                    w[0].end, w[1].start
                )));
            }
        }
        for (k, p) in pieces.iter().enumerate() {
            if p.end <= p.start {
                return Err(Error::InvalidHamiltonian(format!("empty piece #{k}")));
            }
            let next = &pieces[(k + 1) % pieces.len()];
            let right = if k + 1 == pieces.len() { 0.0 } else { next.start };
            let jump = (p.poly.value(p.end) - next.poly.value(right)).abs();
            if jump > BREAKPOINT_TOL {
                return Err(Error::InvalidHamiltonian(format!("discontinuity {jump:.3e} at breakpoint {}", p.end)));
            }
        }
        Ok(Self { period, pieces })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn piece_at(&self, x: f64) -> &TrigPoly {
        let x = super::grid::wrap(x, self.period);
        self.pieces
            .iter()
            .find(|p| x >= p.start && x < p.end)
            .map(|p| &p.poly)
            .unwrap_or(&self.pieces[self.pieces.len() - 1].poly)
    }

    pub fn value(&self, x: f64) -> f64 {
        let xw = super::grid::wrap(x, self.period);
        self.piece_at(xw).value(xw)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let xw = super::grid::wrap(x, self.period);
        self.piece_at(xw).derivative(xw)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let xw = super::grid::wrap(x, self.period);
        self.piece_at(xw).second_derivative(xw)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().map(|p| p.start)
    }
}

/// A function of position used for potentials and couplings.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Trig(TrigPoly),
    Piecewise(PiecewiseTrig),
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Trig(p) => p.value(x),
            Profile::Piecewise(p) => p.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Profile::Trig(p) => p.derivative(x),
            Profile::Piecewise(p) => p.derivative(x),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Profile::Trig(p) => p.second_derivative(x),
            Profile::Piecewise(p) => p.second_derivative(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Trig(p) if p.constant == 0.0 && p.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0))
    }

    /// Breakpoints of a piecewise profile; empty for smooth ones.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Trig(_) => Vec::new(),
            Profile::Piecewise(p) => p.breakpoints().collect(),
        }
    }
}

impl From<TrigPoly> for Profile {
    fn from(p: TrigPoly) -> Self {
        Profile::Trig(p)
    }
}

impl From<PiecewiseTrig> for Profile {
    fn from(p: PiecewiseTrig) -> Self {
        Profile::Piecewise(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_is_exact_on_half_integers() {
        for k in -8..8 {
            assert_eq!(sin_pi(k as f64), 0.0);
            assert_eq!(cos_pi(k as f64 + 0.5), 0.0);
        }
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(cos_pi(1.0), -1.0);
        for &t in &[0.1, 0.37, -2.3, 5.77] {
            assert!((sin_pi(t) - (PI * t).sin()).abs() < 1e-14);
            assert!((cos_pi(t) - (PI * t).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = TrigPoly::cosine(-1.0, 1.0, 1.0).with_term(3.0, 0.2, -0.7);
        for &x in &[0.1, 0.33, 0.8] {
            let e = 1e-6;
            let fd = (p.value(x + e) - p.value(x - e)) / (2.0 * e);
            assert!((fd - p.derivative(x)).abs() < 1e-6);
            let fd2 = (p.derivative(x + e) - p.derivative(x - e)) / (2.0 * e);
            assert!((fd2 - p.second_derivative(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn piecewise_rejects_discontinuity() {
        let bad = PiecewiseTrig::new(
            2.0,
            vec![
                Piece { start: 0.0, end: 1.0, poly: TrigPoly::constant(0.0) },
                Piece { start: 1.0, end: 2.0, poly: TrigPoly::constant(1.0) },
            ],
        );
        assert!(bad.is_err());
    }
}
