//! Critical values of frozen Hamiltonians and the admissible set of `c`.

use crate::error::{Error, Result};
use crate::model::ContactHamiltonian;

use super::grid_function::GridFunction;
use super::operator::{Coupling, Discretization, LaxOleinik};
use super::solve::{solve_with, SolveOptions, SolveStatus};

/// Largest accepted spread of the per-unit-time mean increments over the
/// averaging window.
pub const SPREAD_TOL: f64 = 1e-3;

/// `c(theta)` of `H(x, p, theta)`: minus the asymptotic growth rate of the
/// classical Lax-Oleinik iteration started from zero.
pub fn frozen_critical_value(ham: &ContactHamiltonian, theta: f64, disc: Discretization, n_iter: usize) -> Result<f64> {
    let op = LaxOleinik::new(ham, disc, Coupling::Frozen(theta))?;
    frozen_critical_value_with(&op, n_iter)
}

pub fn frozen_critical_value_with(op: &LaxOleinik<'_>, n_iter: usize) -> Result<f64> {
    let disc = op.discretization();
    let n_iter = n_iter.max(8);
    let mut u = GridFunction::constant(disc.grid, 0.0);
    // `means[k]` is the mean of the k-th iterate; the stored iterate is kept
    // near zero by subtracting `offset`, which the operator commutes with.
    let mut means = Vec::with_capacity(n_iter + 1);
    means.push(0.0);
    let mut offset = 0.0;
    for _ in 0..n_iter {
        u = op.step(&u, 0.0)?.values;
        let shift = u.get(0);
        u = u.map(|v| v - shift);
        offset += shift;
        means.push(offset + u.mean());
    }
    let half = n_iter / 2;
    let rates: Vec<f64> = means[half..].windows(2).map(|w| (w[1] - w[0]) / disc.dt).collect();
    let avg = (means[n_iter] - means[half]) / ((n_iter - half) as f64 * disc.dt);
    // Rates oscillate when the limiting cycle has length > 1.
    let spread = block_spread(&rates);
    if spread > SPREAD_TOL {
        return Err(Error::NeedsMoreIterations { spread });
    }
    Ok(-avg + 0.0)
}

/// Spread of block averages of `rates`, with the block length chosen as the
/// smallest one (up to 16) that makes the averages nearly constant.
fn block_spread(rates: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for len in 1..=16usize.min(rates.len() / 4).max(1) {
        let blocks: Vec<f64> = rates.chunks_exact(len).map(|b| b.iter().sum::<f64>() / len as f64).collect();
        let lo = blocks.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = blocks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        best = best.min(hi - lo);
        if best <= SPREAD_TOL * 1e-3 {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub c: f64,
    pub status: SolveStatus,
    pub drift_rate: f64,
}

impl ProbeSample {
    /// `c` lies below the admissible set: the iterate runs off downward.
    pub fn below(&self) -> bool {
        self.status == SolveStatus::Diverged && self.drift_rate < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeOutcome {
    /// `inf` of the admissible set lies in `[lo, hi]`.
    Bracketed { lo: f64, hi: f64, attained: bool },
    /// Both endpoints on the same side; `all_admissible` when neither runs
    /// off downward.
    BracketTooSmall { all_admissible: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub outcome: ProbeOutcome,
    pub samples: Vec<ProbeSample>,
}

impl ProbeReport {
    pub fn infimum(&self) -> Option<f64> {
        match self.outcome {
            ProbeOutcome::Bracketed { lo, hi, .. } => Some(0.5 * (lo + hi)),
            ProbeOutcome::BracketTooSmall { .. } => None,
        }
    }

    pub fn attained(&self) -> Option<bool> {
        match self.outcome {
            ProbeOutcome::Bracketed { attained, .. } => Some(attained),
            ProbeOutcome::BracketTooSmall { .. } => None,
        }
    }
}

/// Bisects `[c_lo, c_hi]` on "the iteration from zero runs off downward"
/// to bracket the infimum of the admissible set.
pub fn admissible_interval_probe(
    ham: &ContactHamiltonian,
    c_lo: f64,
    c_hi: f64,
    n_bisect: usize,
    disc: Discretization,
    opts: &SolveOptions,
) -> Result<ProbeReport> {
    if !(c_lo < c_hi) {
        return Err(Error::Precondition(format!("empty bracket [{c_lo}, {c_hi}]")));
    }
    let op = LaxOleinik::new(ham, disc, Coupling::Contact)?;
    let zero = GridFunction::constant(disc.grid, 0.0);
    let run = |c: f64| -> Result<ProbeSample> {
        let (_, rep) = solve_with(&op, c, &zero, opts)?;
        Ok(ProbeSample { c, status: rep.status, drift_rate: rep.drift_rate })
    };
    let (lo_s, hi_s) = rayon::join(|| run(c_lo), || run(c_hi));
    let (lo_s, mut hi_s) = (lo_s?, hi_s?);
    let mut samples = vec![lo_s, hi_s];
    if lo_s.below() == hi_s.below() {
        return Ok(ProbeReport { outcome: ProbeOutcome::BracketTooSmall { all_admissible: !lo_s.below() }, samples });
    }
    if hi_s.below() {
        return Err(Error::Precondition(
            "upper endpoint lies below the admissible set while the lower does not".into(),
        ));
    }
    let (mut lo, mut hi) = (c_lo, c_hi);
    for _ in 0..n_bisect {
        let mid = 0.5 * (lo + hi);
        let s = run(mid)?;
        samples.push(s);
        if s.below() {
            lo = mid;
        } else {
            hi = mid;
            hi_s = s;
        }
    }
    Ok(ProbeReport {
        outcome: ProbeOutcome::Bracketed { lo, hi, attained: hi_s.status == SolveStatus::Converged },
        samples,
    })
}
