//! Dense revised simplex for small standard-form linear programs
//!
//! ```text
//! minimize c^T x  subject to  A x = b,  x >= 0
//! ```
//!
//! with sparse columns. Two phases with artificial variables, Bland's
//! anti-cycling rule, and an explicit basis inverse that is updated by
//! elementary row operations and rebuilt periodically.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;
const REFACTOR_EVERY: usize = 64;

/// A linear program in standard form with column-major sparse storage.
#[derive(Debug, Clone, Default)]
pub struct StandardLp {
    rows: usize,
    columns: Vec<Vec<(usize, f64)>>,
    costs: Vec<f64>,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl StandardLp {
    pub fn new(rhs: Vec<f64>) -> Self {
        Self { rows: rhs.len(), columns: Vec::new(), costs: Vec::new(), rhs }
    }

    /// Adds a variable and returns its index. Entries with a zero
    /// coefficient are dropped.
    pub fn add_column(&mut self, cost: f64, entries: &[(usize, f64)]) -> usize {
        let col: Vec<(usize, f64)> = entries.iter().copied().filter(|&(_, a)| a != 0.0).collect();
        debug_assert!(col.iter().all(|&(r, _)| r < self.rows));
        self.columns.push(col);
        self.costs.push(cost);
        self.columns.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn solve(&self, max_iter: usize) -> Result<LpSolution> {
        Simplex::new(self).run(max_iter)
    }
}

struct Simplex<'a> {
    lp: &'a StandardLp,
    m: usize,
    /// Row signs that make the right-hand side nonnegative.
    sign: Vec<f64>,
    b: Vec<f64>,
    /// Basic variable per row; indices `>= n` are artificials.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a StandardLp) -> Self {
        let m = lp.rows;
        let n = lp.columns.len();
        let sign: Vec<f64> = lp.rhs.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = lp.rhs.iter().zip(&sign).map(|(v, s)| v * s).collect();
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        let mut is_basic = vec![false; n + m];
        for r in 0..m {
            is_basic[n + r] = true;
        }
        Self { lp, m, sign, xb: b.clone(), b, basis: (n..n + m).collect(), is_basic, binv, since_refactor: 0 }
    }

    fn n(&self) -> usize {
        self.lp.columns.len()
    }

    /// Column `j` with row signs applied; artificials are unit vectors.
    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if j < self.n() {
            out.extend(self.lp.columns[j].iter().map(|&(r, a)| (r, a * self.sign[r])));
        } else {
            out.push((j - self.n(), 1.0));
        }
    }

    fn run(mut self, max_iter: usize) -> Result<LpSolution> {
        let n = self.n();
        let phase1_cost = |j: usize| if j >= n { 1.0 } else { 0.0 };
        let mut iterations = self.optimize(&phase1_cost, false, max_iter)?;
        let infeasibility: f64 = (0..self.m).filter(|&r| self.basis[r] >= n).map(|r| self.xb[r]).sum();
        if infeasibility > FEAS_TOL * (1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
            return Err(Error::Infeasible);
        }
        self.drive_out_artificials();
        let lp = self.lp;
        let costs = &lp.costs;
        let phase2_cost = |j: usize| if j >= n { 0.0 } else { costs[j] };
        iterations += self.optimize(&phase2_cost, true, max_iter.saturating_sub(iterations))?;
        let mut x = vec![0.0; n];
        for r in 0..self.m {
            let j = self.basis[r];
            if j < n {
                x[j] = self.xb[r].max(0.0);
            }
        }
        let objective = x.iter().zip(costs).map(|(a, c)| a * c).sum();
        Ok(LpSolution { x, objective, iterations })
    }

    /// Simplex iterations for the given cost function. In phase two the
    /// artificials never enter.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> f64, phase2: bool, max_iter: usize) -> Result<usize> {
        let m = self.m;
        let n = self.n();
        let total = if phase2 { n } else { n + m };
        let mut col = Vec::new();
        let mut y = vec![0.0; m];
        let mut dcol = vec![0.0; m];
        let mut it = 0;
        loop {
            if it >= max_iter {
                return Err(Error::IterationLimit(it));
            }
            // Duals y = c_B^T B^{-1}.
            y.iter_mut().for_each(|v| *v = 0.0);
            for r in 0..m {
                let cb = cost(self.basis[r]);
                if cb != 0.0 {
                    let row = &self.binv[r * m..(r + 1) * m];
                    for (yk, &bk) in y.iter_mut().zip(row) {
                        *yk += cb * bk;
                    }
                }
            }
            // Bland: the first improving column enters.
            let mut entering = None;
            for j in 0..total {
                if self.is_basic[j] {
                    continue;
                }
                self.column(j, &mut col);
                let d = cost(j) - col.iter().map(|&(r, a)| y[r] * a).sum::<f64>();
                if d < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else {
                return Ok(it);
            };
            // Direction B^{-1} a_q.
            self.column(q, &mut col);
            for (r, d) in dcol.iter_mut().enumerate() {
                let row = &self.binv[r * m..(r + 1) * m];
                *d = col.iter().map(|&(k, a)| row[k] * a).sum();
            }
            // Ratio test, ties broken by the smallest basic index.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                if dcol[r] > PIVOT_TOL {
                    let t = self.xb[r].max(0.0) / dcol[r];
                    let better = match leave {
                        None => true,
                        Some((lr, lt)) => t < lt - 1e-12 || (t <= lt + 1e-12 && self.basis[r] < self.basis[lr]),
                    };
                    if better {
                        leave = Some((r, t));
                    }
                }
            }
            let Some((p, t)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(p, q, &dcol, t);
            it += 1;
        }
    }

    fn pivot(&mut self, p: usize, q: usize, dcol: &[f64], t: f64) {
        let m = self.m;
        for r in 0..m {
            if r != p {
                self.xb[r] -= t * dcol[r];
            }
        }
        self.xb[p] = t;
        let piv = dcol[p];
        let (before, rest) = self.binv.split_at_mut(p * m);
        let (prow, after) = rest.split_at_mut(m);
        prow.iter_mut().for_each(|v| *v /= piv);
        for (r, row) in before.chunks_exact_mut(m).chain(after.chunks_exact_mut(m)).enumerate() {
            let r = if r < p { r } else { r + 1 };
            let f = dcol[r];
            if f != 0.0 {
                for (a, &b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        self.is_basic[self.basis[p]] = false;
        self.is_basic[q] = true;
        self.basis[p] = q;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Rebuilds `B^{-1}` and `x_B` from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        let mut col = Vec::new();
        for (c, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for &(r, v) in &col {
                a[r * m + c] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for k in 0..m {
            let piv_row = (k..m).max_by(|&i, &j| a[i * m + k].abs().total_cmp(&a[j * m + k].abs())).unwrap();
            if a[piv_row * m + k].abs() < 1e-14 {
                // Numerically singular; keep the updated inverse.
                self.since_refactor = 0;
                return;
            }
            if piv_row != k {
                for c in 0..m {
                    a.swap(k * m + c, piv_row * m + c);
                    inv.swap(k * m + c, piv_row * m + c);
                }
            }
            let piv = a[k * m + k];
            for c in 0..m {
                a[k * m + c] /= piv;
                inv[k * m + c] /= piv;
            }
            for r in 0..m {
                if r != k {
                    let f = a[r * m + k];
                    if f != 0.0 {
                        for c in 0..m {
                            a[r * m + c] -= f * a[k * m + c];
                            inv[r * m + c] -= f * inv[k * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.xb[r] = row.iter().zip(&self.b).map(|(a, b)| a * b).sum();
        }
        self.since_refactor = 0;
    }

    /// Replaces artificials that are basic at level zero by structural
    /// columns where possible. Rows where no structural column has a
    /// nonzero entry are redundant; their artificial stays basic at zero.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        let n = self.n();
        let mut col = Vec::new();
        let mut dcol = vec![0.0; m];
        for p in 0..m {
            if self.basis[p] < n {
                continue;
            }
            let mut found = None;
            for j in 0..n {
                if self.is_basic[j] {
                    continue;
                }
                self.column(j, &mut col);
                let row = &self.binv[p * m..(p + 1) * m];
                let v: f64 = col.iter().map(|&(k, a)| row[k] * a).sum();
                if v.abs() > 1e-7 {
                    found = Some(j);
                    break;
                }
            }
            if let Some(q) = found {
                self.column(q, &mut col);
                for (r, d) in dcol.iter_mut().enumerate() {
                    let row = &self.binv[r * m..(r + 1) * m];
                    *d = col.iter().map(|&(k, a)| row[k] * a).sum();
                }
                self.pivot(p, q, &dcol, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_problem() {
        // min -x - y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
        let mut lp = StandardLp::new(vec![4.0, 6.0]);
        lp.add_column(-1.0, &[(0, 1.0), (1, 3.0)]);
        lp.add_column(-1.0, &[(0, 2.0), (1, 1.0)]);
        lp.add_column(0.0, &[(0, 1.0)]);
        lp.add_column(0.0, &[(1, 1.0)]);
        let s = lp.solve(100).unwrap();
        assert!((s.objective + 2.8).abs() < 1e-12);
        assert!((s.x[0] - 1.6).abs() < 1e-12 && (s.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = StandardLp::new(vec![-1.0]);
        lp.add_column(1.0, &[(0, 1.0)]);
        assert_eq!(lp.solve(100), Err(Error::Infeasible));
        let mut lp2 = StandardLp::new(vec![1.0]);
        lp2.add_column(-1.0, &[(0, 1.0)]);
        lp2.add_column(-1.0, &[(0, -1.0)]);
        assert_eq!(lp2.solve(100), Err(Error::Unbounded));
    }

    #[test]
    fn redundant_rows() {
        // x + y = 1 twice.
        let mut lp = StandardLp::new(vec![1.0, 1.0]);
        lp.add_column(2.0, &[(0, 1.0), (1, 1.0)]);
        lp.add_column(1.0, &[(0, 1.0), (1, 1.0)]);
        let s = lp.solve(100).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
