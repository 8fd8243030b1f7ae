//! Value iteration `u <- T_c[u]` to a stationary solution.

use crate::error::Result;
use crate::model::ContactHamiltonian;

use super::grid_function::GridFunction;
use super::operator::{Coupling, Discretization, LaxOleinik};
use super::residual::residual;

/// Iterates whose sup-norm exceeds this are declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol_fix: f64,
    pub max_iter: usize,
    pub divergence_threshold: f64,
    /// Per-node drift (value change per unit time) that counts as a
    /// persistent runaway once it is steady over two windows.
    pub drift_tol: f64,
    /// Iterations between drift checks.
    pub check_every: usize,
    /// Drift is not judged before this much simulated time.
    pub min_time: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_fix: 1e-8,
            max_iter: 200_000,
            divergence_threshold: DIVERGENCE_THRESHOLD,
            drift_tol: 1e-3,
            check_every: 500,
            min_time: 40.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// Sup-norm above the threshold or a steady uniform drift.
    Diverged,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub converged: bool,
    pub iterations: usize,
    pub sup_update: f64,
    /// Mean value change per unit time over the last quarter of iterations.
    pub drift_rate: f64,
    pub residual_linf: f64,
}

/// Runs `u <- T_c[u]` from `init` until the sup-norm update drops to
/// `tol_fix`, the iterate runs away, or `max_iter` is reached.
pub fn solve_stationary(
    ham: &ContactHamiltonian,
    c: f64,
    init: &GridFunction,
    disc: Discretization,
    opts: &SolveOptions,
) -> Result<(GridFunction, SolveReport)> {
    let op = LaxOleinik::new(ham, disc, Coupling::Contact)?;
    solve_with(&op, c, init, opts)
}

pub fn solve_with(
    op: &LaxOleinik<'_>,
    c: f64,
    init: &GridFunction,
    opts: &SolveOptions,
) -> Result<(GridFunction, SolveReport)> {
    let disc = *op.discretization();
    init.check_same_grid(&GridFunction::constant(disc.grid, 0.0))?;
    let dt = disc.dt;
    let mut u = init.clone();
    let mut means = Vec::with_capacity(opts.max_iter.min(1 << 20) + 1);
    means.push(u.mean());
    let mut snapshots: Vec<Vec<f64>> = vec![u.values().to_vec()];
    let check_every = opts.check_every.max(1);
    let mut status = SolveStatus::MaxIter;
    let mut sup_update = f64::INFINITY;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let next = op.step(&u, c)?.values;
        sup_update = next.sup_dist(&u)?;
        u = next;
        iterations += 1;
        means.push(u.mean());
        if sup_update <= opts.tol_fix {
            status = SolveStatus::Converged;
            break;
        }
        if !(u.sup_norm() <= opts.divergence_threshold) {
            status = SolveStatus::Diverged;
            break;
        }
        if iterations % check_every == 0 {
            snapshots.push(u.values().to_vec());
            if iterations as f64 * dt >= opts.min_time && steady_drift(&snapshots, check_every, dt, opts.drift_tol) {
                status = SolveStatus::Diverged;
                break;
            }
        }
    }

    let drift_rate = quarter_drift(&means, dt);
    let residual_linf = residual(ham_of(op), &u, c)?.sup_excluding_kinks;
    Ok((
        u,
        SolveReport {
            status,
            converged: status == SolveStatus::Converged,
            iterations,
            sup_update,
            drift_rate,
            residual_linf,
        },
    ))
}

fn ham_of<'a>(op: &LaxOleinik<'a>) -> &'a ContactHamiltonian {
    op.view().hamiltonian()
}

/// Mean value change per unit time over the last quarter of the run.
fn quarter_drift(means: &[f64], dt: f64) -> f64 {
    let n = means.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let q = (n / 4).max(1);
    let r = (means[n] - means[n - q]) / (q as f64 * dt);
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// Every node moves in the same direction at a rate above `drift_tol`, and
/// the rates over the last two quarter windows agree to 10%.
fn steady_drift(snapshots: &[Vec<f64>], check_every: usize, dt: f64, drift_tol: f64) -> bool {
    let k = snapshots.len() - 1;
    let w = k / 4;
    if w == 0 {
        return false;
    }
    let span = (w * check_every) as f64 * dt;
    let (a, b, c) = (&snapshots[k - 2 * w], &snapshots[k - w], &snapshots[k]);
    let mut sign = 0.0;
    for i in 0..a.len() {
        let d0 = (b[i] - a[i]) / span;
        let d1 = (c[i] - b[i]) / span;
        if d1.abs() < drift_tol || d0.abs() < drift_tol || d0.signum() != d1.signum() {
            return false;
        }
        if sign == 0.0 {
            sign = d1.signum();
        } else if d1.signum() != sign {
            return false;
        }
        if (d1 - d0).abs() > 0.1 * d1.abs() {
            return false;
        }
    }
    true
}

/// One fixed point found by [`explore_multiplicity`].
#[derive(Debug, Clone)]
pub struct LadderSolution {
    /// Initial constants that led to this fixed point.
    pub kappas: Vec<f64>,
    pub solution: GridFunction,
    pub report: SolveReport,
}

/// Solves from `u = kappa` for every rung of the ladder and groups the
/// converged results; two fixed points are distinct when their sup-distance
/// exceeds `10 tol_fix`.
pub fn explore_multiplicity(
    ham: &ContactHamiltonian,
    c: f64,
    disc: Discretization,
    kappas: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<LadderSolution>, Vec<(f64, SolveReport)>)> {
    use rayon::prelude::*;
    let op = LaxOleinik::new(ham, disc, Coupling::Contact)?;
    let runs: Vec<Result<(f64, GridFunction, SolveReport)>> = kappas
        .par_iter()
        .map(|&k| {
            let init = GridFunction::constant(disc.grid, k);
            let (u, rep) = solve_with(&op, c, &init, opts)?;
            Ok((k, u, rep))
        })
        .collect();
    let mut found: Vec<LadderSolution> = Vec::new();
    let mut failed = Vec::new();
    for run in runs {
        let (k, u, rep) = run?;
        if !rep.converged {
            failed.push((k, rep));
            continue;
        }
        let mut matched = false;
        for f in &mut found {
            if f.solution.sup_dist(&u)? <= 10.0 * opts.tol_fix {
                f.kappas.push(k);
                matched = true;
                break;
            }
        }
        if !matched {
            found.push(LadderSolution { kappas: vec![k], solution: u, report: rep });
        }
    }
    Ok((found, failed))
}
