//! Revised primal simplex for `min c'x` over `x >= 0` with `=` and `<=` rows.
//!
//! The basis inverse is kept explicitly and updated by elementary row
//! operations, with periodic refactorisation. Row duals follow the usual
//! minimisation convention: `c_j - y'A_j >= 0` at optimality, hence duals of
//! `<=` rows are non-positive.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    relations: Vec<Relation>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable without row entries.
    pub fn add_variable(&mut self, cost: f64) -> usize {
        self.objective.push(cost);
        self.columns.push(Vec::new());
        self.objective.len() - 1
    }

    /// Adds a row over existing variables.
    pub fn add_row(&mut self, coeffs: &[(usize, f64)], relation: Relation, rhs: f64) -> usize {
        let row = self.rhs.len();
        for &(j, a) in coeffs {
            assert!(j < self.columns.len(), "variable {j} out of range");
            if a != 0.0 {
                self.columns[j].push((row, a));
            }
        }
        self.relations.push(relation);
        self.rhs.push(rhs);
        row
    }

    /// Appends a variable with the given cost and row entries. A basis of a
    /// previous solve stays primal feasible with the new variable at zero.
    pub fn add_column(&mut self, cost: f64, entries: &[(usize, f64)]) -> usize {
        let mut col: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for &(i, a) in entries {
            assert!(i < self.rhs.len(), "row {i} out of range");
            if a != 0.0 {
                col.push((i, a));
            }
        }
        self.objective.push(cost);
        self.columns.push(col);
        self.objective.len() - 1
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective[var] = cost;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.objective[var]
    }

    pub fn column(&self, var: usize) -> &[(usize, f64)] {
        &self.columns[var]
    }

    pub fn relation(&self, row: usize) -> Relation {
        self.relations[row]
    }

    pub fn rhs(&self, row: usize) -> f64 {
        self.rhs[row]
    }

    fn check(&self) -> Result<(), LpError> {
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(LpError::Malformed(format!("non-finite cost on variable {j}")));
        }
        if let Some(i) = self.rhs.iter().position(|b| !b.is_finite()) {
            return Err(LpError::Malformed(format!("non-finite right-hand side on row {i}")));
        }
        for (j, col) in self.columns.iter().enumerate() {
            if col.iter().any(|(_, a)| !a.is_finite()) {
                return Err(LpError::Malformed(format!("non-finite coefficient in column {j}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump: `obj j c`, `row i {eq|le} b` and `a i j v` lines, rows in order.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        for (j, c) in self.objective.iter().enumerate() {
            if *c != 0.0 {
                let _ = writeln!(out, "obj {j} {c}");
            }
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            entries.extend(col.iter().map(|&(i, a)| (i, j, a)));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut k = 0;
        for i in 0..self.rhs.len() {
            let rel = match self.relations[i] {
                Relation::Eq => "eq",
                Relation::Le => "le",
            };
            let _ = writeln!(out, "row {i} {rel} {}", self.rhs[i]);
            while k < entries.len() && entries[k].0 == i {
                let _ = writeln!(out, "a {i} {} {}", entries[k].1, entries[k].2);
                k += 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

/// A basic variable: a structural column or the logical column of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicVar {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

/// Basic variable per row, reusable as a warm start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis(pub Vec<BasicVar>);

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One dual per row, in the original row orientation.
    pub duals: Vec<f64>,
    pub basis: Option<Basis>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `b'y` of the reported duals.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        self.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("basis matrix is numerically singular at row {row}")]
    Singular { row: usize },
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub tol_feas: f64,
    pub tol_dual: f64,
    pub tol_pivot: f64,
    pub max_iterations: usize,
    /// Degenerate pivots in a row before switching to Bland's rule.
    pub stall_threshold: usize,
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-7,
            tol_dual: 1e-9,
            tol_pivot: 1e-9,
            max_iterations: 200_000,
            stall_threshold: 50,
            refactor_every: 100,
        }
    }
}

/// Seam for alternative LP engines.
pub trait LpEngine: Send + Sync {
    fn solve(&self, lp: &LinearProgram, warm: Option<&Basis>) -> Result<LpSolution, LpError>;
}

#[derive(Debug, Clone, Default)]
pub struct RevisedSimplex {
    pub options: SimplexOptions,
}

impl LpEngine for RevisedSimplex {
    fn solve(&self, lp: &LinearProgram, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
        lp.check()?;
        let mut t = Tableau::new(lp, &self.options);
        t.run(warm)
    }
}

/// Solves with the built-in revised simplex and default tolerances.
pub fn solve_lp(lp: &LinearProgram, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
    RevisedSimplex::default().solve(lp, warm)
}

/// Free-standing form of [`LinearProgram::add_column`].
pub fn add_column(lp: &mut LinearProgram, cost: f64, entries: &[(usize, f64)]) -> usize {
    lp.add_column(cost, entries)
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterLimit,
}

// Internal variable layout: [0, n) structural, [n, n+m) slacks, [n+m, n+2m) artificials.
struct Tableau<'a> {
    lp: &'a LinearProgram,
    opts: &'a SimplexOptions,
    n: usize,
    m: usize,
    sign: Vec<f64>,
    b: Vec<f64>,
    basic: Vec<usize>,
    position: Vec<Option<usize>>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    y: Vec<f64>,
    alpha: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    phase1: bool,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LinearProgram, opts: &'a SimplexOptions) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let sign: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let b = lp.rhs.iter().zip(&sign).map(|(b, s)| b * s).collect();
        Self {
            lp,
            opts,
            n,
            m,
            sign,
            b,
            basic: vec![0; m],
            position: vec![None; n + 2 * m],
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            y: vec![0.0; m],
            alpha: vec![0.0; m],
            iterations: 0,
            since_refactor: 0,
            phase1: false,
        }
    }

    fn is_artificial(&self, k: usize) -> bool {
        k >= self.n + self.m
    }

    /// Basic artificials outside phase one must stay at zero.
    fn blocked(&self, row: usize) -> bool {
        !self.phase1 && self.is_artificial(self.basic[row])
    }

    fn leave_rank(&self, k: usize) -> u8 {
        if self.is_artificial(k) {
            2
        } else if k < self.n {
            1
        } else {
            0
        }
    }

    /// Whether variable `k` may enter the basis.
    fn eligible(&self, k: usize) -> bool {
        if k < self.n {
            true
        } else if k < self.n + self.m {
            self.lp.relations[k - self.n] == Relation::Le
        } else {
            false
        }
    }

    fn for_column(&self, k: usize, mut f: impl FnMut(usize, f64)) {
        if k < self.n {
            for &(i, a) in &self.lp.columns[k] {
                f(i, self.sign[i] * a);
            }
        } else if k < self.n + self.m {
            let i = k - self.n;
            f(i, self.sign[i]);
        } else {
            f(k - self.n - self.m, 1.0);
        }
    }

    fn set_basis(&mut self, basic: Vec<usize>) {
        self.position.iter_mut().for_each(|p| *p = None);
        for (i, &k) in basic.iter().enumerate() {
            self.position[k] = Some(i);
        }
        self.basic = basic;
    }

    fn cold_start(&mut self) -> bool {
        let m = self.m;
        let basic: Vec<usize> = (0..m)
            .map(|i| {
                if self.lp.relations[i] == Relation::Le && self.sign[i] > 0.0 {
                    self.n + i
                } else {
                    self.n + m + i
                }
            })
            .collect();
        let needs_phase1 = basic.iter().any(|&k| self.is_artificial(k));
        self.set_basis(basic);
        self.binv.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        self.xb.copy_from_slice(&self.b);
        self.since_refactor = 0;
        needs_phase1
    }

    fn try_warm_start(&mut self, warm: &Basis) -> bool {
        if warm.0.len() != self.m {
            return false;
        }
        let mut basic = Vec::with_capacity(self.m);
        let mut seen = vec![false; self.n + 2 * self.m];
        for bv in &warm.0 {
            let k = match *bv {
                BasicVar::Structural(j) if j < self.n => j,
                BasicVar::Slack(i) if i < self.m && self.lp.relations[i] == Relation::Le => self.n + i,
                BasicVar::Artificial(i) if i < self.m => self.n + self.m + i,
                _ => return false,
            };
            if std::mem::replace(&mut seen[k], true) {
                return false;
            }
            basic.push(k);
        }
        self.set_basis(basic);
        if self.refactor().is_err() {
            return false;
        }
        let tol = self.opts.tol_feas;
        (0..self.m).all(|i| self.xb[i] >= -tol && (!self.is_artificial(self.basic[i]) || self.xb[i] <= tol))
    }

    /// Recomputes the basis inverse by Gauss-Jordan elimination and the basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let w = 2 * m;
        let mut aug = vec![0.0; m * w];
        for (c, &k) in self.basic.iter().enumerate() {
            self.for_column(k, |i, a| aug[i * w + c] = a);
        }
        for i in 0..m {
            aug[i * w + m + i] = 1.0;
        }
        for col in 0..m {
            let (mut best, mut piv) = (0.0, usize::MAX);
            for r in col..m {
                let v = aug[r * w + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return Err(LpError::Singular { row: col });
            }
            if piv != col {
                for c in 0..w {
                    aug.swap(piv * w + c, col * w + c);
                }
            }
            let p = aug[col * w + col];
            for c in 0..w {
                aug[col * w + c] /= p;
            }
            let (head, tail) = aug.split_at_mut(col * w);
            let (prow, rest) = tail.split_at_mut(w);
            for (r, row) in head.chunks_exact_mut(w).chain(rest.chunks_exact_mut(w)).enumerate() {
                let f = row[col];
                if f != 0.0 {
                    let _ = r;
                    for c in 0..w {
                        row[c] -= f * prow[c];
                    }
                }
            }
        }
        // Column c of B corresponds to row position c of the basis, so the
        // inverse's row c gives basic variable c.
        for r in 0..m {
            self.binv[r * m..(r + 1) * m].copy_from_slice(&aug[r * w + m..r * w + w]);
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            let v: f64 = row.iter().zip(&self.b).map(|(a, b)| a * b).sum();
            self.xb[r] = if v < 0.0 && v > -self.opts.tol_feas { 0.0 } else { v };
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn compute_duals(&mut self, cost: &dyn Fn(usize) -> f64) {
        let m = self.m;
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let c = cost(self.basic[i]);
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yj, bij) in self.y.iter_mut().zip(row) {
                    *yj += c * bij;
                }
            }
        }
    }

    fn reduced_cost(&self, k: usize, cost: &dyn Fn(usize) -> f64) -> f64 {
        let mut d = cost(k);
        self.for_column(k, |i, a| d -= self.y[i] * a);
        d
    }

    fn compute_alpha(&mut self, k: usize) {
        let m = self.m;
        let mut alpha = std::mem::take(&mut self.alpha);
        alpha.iter_mut().for_each(|v| *v = 0.0);
        self.for_column(k, |r, a| {
            for i in 0..m {
                alpha[i] += self.binv[i * m + r] * a;
            }
        });
        self.alpha = alpha;
    }

    fn pivot(&mut self, r: usize, k: usize, theta: f64) {
        let m = self.m;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * self.alpha[i];
                if self.xb[i] < 0.0 && self.xb[i] > -self.opts.tol_feas {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;
        let p = self.alpha[r];
        for c in 0..m {
            self.binv[r * m + c] /= p;
        }
        let (head, tail) = self.binv.split_at_mut(r * m);
        let (prow, rest) = tail.split_at_mut(m);
        for (i, row) in head.chunks_exact_mut(m).enumerate().chain(rest.chunks_exact_mut(m).enumerate().map(|(j, row)| (r + 1 + j, row))) {
            let f = self.alpha[i];
            if f != 0.0 {
                for c in 0..m {
                    row[c] -= f * prow[c];
                }
            }
        }
        let leaving = self.basic[r];
        self.position[leaving] = None;
        self.position[k] = Some(r);
        self.basic[r] = k;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    fn iterate(&mut self, cost: &dyn Fn(usize) -> f64) -> Result<PhaseEnd, LpError> {
        let total = self.n + 2 * self.m;
        let mut bland = false;
        let mut stalled = 0usize;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(PhaseEnd::IterLimit);
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            self.compute_duals(cost);

            let mut entering = None;
            let mut best = -self.opts.tol_dual;
            for k in 0..total {
                if self.position[k].is_some() || !self.eligible(k) {
                    continue;
                }
                let d = self.reduced_cost(k, cost);
                if d < best {
                    best = d;
                    entering = Some(k);
                    if bland {
                        break;
                    }
                }
            }
            let Some(k) = entering else { return Ok(PhaseEnd::Optimal) };

            self.compute_alpha(k);
            let tol_piv = self.opts.tol_pivot;
            let mut leave = None;
            if bland {
                let mut best_ratio = f64::INFINITY;
                for i in 0..self.m {
                    let a = self.alpha[i];
                    let ratio = if self.blocked(i) && a.abs() > tol_piv {
                        0.0
                    } else if a > tol_piv {
                        self.xb[i].max(0.0) / a
                    } else {
                        continue;
                    };
                    let better = match leave {
                        None => true,
                        Some(j) => {
                            ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && self.basic[i] < self.basic[j])
                        }
                    };
                    if better {
                        best_ratio = ratio.min(best_ratio);
                        leave = Some(i);
                    }
                }
            } else {
                // Harris two-pass ratio test
                let tol = self.opts.tol_feas;
                let mut bound = f64::INFINITY;
                for i in 0..self.m {
                    let a = self.alpha[i];
                    if self.blocked(i) && a.abs() > tol_piv {
                        bound = 0.0;
                    } else if a > tol_piv {
                        bound = bound.min((self.xb[i].max(0.0) + tol) / a);
                    }
                }
                // Among pivots of comparable size, artificials leave first and
                // slacks last, which keeps slack rows basic in degenerate ties.
                let mut best = (0.0f64, 0u8);
                for i in 0..self.m {
                    let a = self.alpha[i];
                    let cand = if self.blocked(i) && a.abs() > tol_piv {
                        bound == 0.0
                    } else {
                        a > tol_piv && self.xb[i].max(0.0) / a <= bound
                    };
                    if !cand {
                        continue;
                    }
                    let a = a.abs();
                    let rank = self.leave_rank(self.basic[i]);
                    if a > best.0 * (1.0 + 1e-9) || (a >= best.0 * (1.0 - 1e-9) && rank > best.1) {
                        best = (a, rank);
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else { return Ok(PhaseEnd::Unbounded) };
            let theta = if self.blocked(r) { 0.0 } else { (self.xb[r].max(0.0)) / self.alpha[r] };
            if self.blocked(r) {
                self.xb[r] = 0.0;
            }
            self.pivot(r, k, theta);
            if theta * (-best) <= 1e-12 {
                stalled += 1;
                if stalled > self.opts.stall_threshold {
                    bland = true;
                }
            } else {
                stalled = 0;
                bland = false;
            }
        }
    }

    /// Pivots basic artificials (at zero after phase one) out where possible.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basic[r]) {
                continue;
            }
            let mut best = (1e-7, None);
            for k in 0..self.n + self.m {
                if self.position[k].is_some() || !self.eligible(k) {
                    continue;
                }
                let mut v = 0.0;
                self.for_column(k, |i, a| v += self.binv[r * m + i] * a);
                if v.abs() > best.0 {
                    best = (v.abs(), Some(k));
                }
            }
            if let Some(k) = best.1 {
                self.compute_alpha(k);
                self.xb[r] = 0.0;
                self.pivot(r, k, 0.0);
            }
        }
    }

    fn run(&mut self, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
        let warmed = warm.is_some_and(|w| self.try_warm_start(w));
        if !warmed {
            let needs_phase1 = self.cold_start();
            if needs_phase1 {
                let n_m = self.n + self.m;
                let phase1 = move |k: usize| if k >= n_m { 1.0 } else { 0.0 };
                self.phase1 = true;
                let end = self.iterate(&phase1)?;
                self.phase1 = false;
                match end {
                    PhaseEnd::IterLimit => return Ok(self.finish(LpStatus::IterLimit)),
                    PhaseEnd::Unbounded => unreachable!("phase one is bounded below"),
                    PhaseEnd::Optimal => {}
                }
                self.refactor()?;
                let infeas: f64 =
                    (0..self.m).filter(|&i| self.is_artificial(self.basic[i])).map(|i| self.xb[i]).sum();
                let scale = 1.0 + self.b.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                if infeas > self.opts.tol_feas * scale {
                    return Ok(self.finish(LpStatus::Infeasible));
                }
                self.drive_out_artificials();
            }
        }
        let lp = self.lp;
        let n = self.n;
        let phase2 = move |k: usize| if k < n { lp.objective[k] } else { 0.0 };
        let status = match self.iterate(&phase2)? {
            PhaseEnd::Optimal => LpStatus::Optimal,
            PhaseEnd::Unbounded => LpStatus::Unbounded,
            PhaseEnd::IterLimit => LpStatus::IterLimit,
        };
        self.refactor()?;
        self.compute_duals(&phase2);
        Ok(self.finish(status))
    }

    fn finish(&self, status: LpStatus) -> LpSolution {
        let mut x = vec![0.0; self.n];
        for (i, &k) in self.basic.iter().enumerate() {
            if k < self.n {
                x[k] = self.xb[i].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.lp.objective).map(|(x, c)| x * c).sum();
        let duals = self.y.iter().zip(&self.sign).map(|(y, s)| y * s).collect();
        let basis = (status == LpStatus::Optimal).then(|| {
            Basis(
                self.basic
                    .iter()
                    .map(|&k| {
                        if k < self.n {
                            BasicVar::Structural(k)
                        } else if k < self.n + self.m {
                            BasicVar::Slack(k - self.n)
                        } else {
                            BasicVar::Artificial(k - self.n - self.m)
                        }
                    })
                    .collect(),
            )
        });
        LpSolution { status, x, objective, duals, basis, iterations: self.iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn equality_row_dual() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0);
        lp.add_row(&[(x, 1.0)], Relation::Eq, 1.0);
        let s = solve_lp(&lp, None).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 1.0));
        assert!(close(s.duals[0], 1.0));
    }

    #[test]
    fn le_row_dual_is_nonpositive() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0);
        lp.add_row(&[(x, 1.0)], Relation::Le, 3.0);
        let s = solve_lp(&lp, None).unwrap();
        assert!(close(s.objective, -3.0));
        assert!(close(s.duals[0], -1.0));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0);
        lp.add_row(&[(x, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp, None).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0);
        let y = lp.add_variable(0.0);
        lp.add_row(&[(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp, None).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x + y, -x - y <= -2, x - y = 0
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(1.0);
        let y = lp.add_variable(1.0);
        lp.add_row(&[(x, -1.0), (y, -1.0)], Relation::Le, -2.0);
        lp.add_row(&[(x, 1.0), (y, -1.0)], Relation::Eq, 0.0);
        let s = solve_lp(&lp, None).unwrap();
        assert!(close(s.objective, 2.0));
        assert!(close(s.x[0], 1.0) && close(s.x[1], 1.0));
        assert!(s.duals[0] <= 1e-9);
        assert!(close(s.dual_objective(&lp), s.objective));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(2.0);
        let y = lp.add_variable(3.0);
        lp.add_row(&[(x, 1.0), (y, 1.0)], Relation::Eq, 4.0);
        lp.add_row(&[(x, 2.0), (y, 2.0)], Relation::Eq, 8.0);
        let s = solve_lp(&lp, None).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 8.0));
        assert!(close(s.dual_objective(&lp), 8.0));
    }

    fn dummy_rmp() -> LinearProgram {
        // one capacity row (<= 1) and one convexity row (= 1) with a dummy at cost 100
        let mut lp = LinearProgram::new();
        let d = lp.add_variable(100.0);
        lp.add_row(&[], Relation::Le, 1.0);
        lp.add_row(&[(d, 1.0)], Relation::Eq, 1.0);
        lp
    }

    #[test]
    fn added_column_warm_start() {
        let mut lp = dummy_rmp();
        let s0 = solve_lp(&lp, None).unwrap();
        assert!(close(s0.objective, 100.0));

        lp.add_column(0.0, &[]);
        let s1 = solve_lp(&lp, s0.basis.as_ref()).unwrap();
        assert!(close(s1.objective, 100.0));

        let c = lp.add_column(7.0, &[(0, 1.0), (1, 1.0)]);
        let s2 = solve_lp(&lp, s1.basis.as_ref()).unwrap();
        assert!(close(s2.objective, 7.0));
        assert!(close(s2.x[c], 1.0));

        lp.add_column(7.0, &[(0, 1.0), (1, 1.0)]);
        let s3 = solve_lp(&lp, s2.basis.as_ref()).unwrap();
        assert!(close(s3.objective, 7.0));
        assert_eq!(s3.iterations, 0);
    }

    #[test]
    fn malformed_and_stale_basis() {
        let mut lp = dummy_rmp();
        lp.set_cost(0, f64::NAN);
        assert!(matches!(solve_lp(&lp, None), Err(LpError::Malformed(_))));

        let lp = dummy_rmp();
        let stale = Basis(vec![BasicVar::Structural(5), BasicVar::Slack(0)]);
        let s = solve_lp(&lp, Some(&stale)).unwrap();
        assert!(close(s.objective, 100.0));
    }

    #[test]
    fn iteration_limit() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0);
        lp.add_row(&[(x, 1.0)], Relation::Le, 3.0);
        let engine = RevisedSimplex { options: SimplexOptions { max_iterations: 0, ..Default::default() } };
        assert_eq!(engine.solve(&lp, None).unwrap().status, LpStatus::IterLimit);
    }

    #[test]
    fn triplet_dump() {
        let mut lp = dummy_rmp();
        lp.add_column(7.0, &[(0, 1.0), (1, 1.0)]);
        let dump = lp.to_triplets();
        assert_eq!(dump, "obj 0 100\nobj 1 7\nrow 0 le 1\na 0 1 1\nrow 1 eq 1\na 1 0 1\na 1 1 1\n");
    }
}
