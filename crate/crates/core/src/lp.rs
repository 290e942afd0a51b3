//! Bounded-variable revised simplex.
//!
//! Problems have the form `min c x  s.t.  A x (<=|>=|=) b,  l <= x <= u`.
//! Every row gets a logical variable `s_i` so that `A x + s = b`, with
//! `s_i >= 0` for `<=` rows, `s_i <= 0` for `>=` rows and `s_i = 0` for
//! equalities. The basis inverse is kept dense and updated by elementary row
//! operations, with periodic refactorization.
//!
//! Infeasible starting bases (cold starts, or warm starts after bound
//! changes) go through a composite phase 1 that minimizes the sum of bound
//! violations of the basic variables. Pricing is Dantzig's rule; after a run
//! of degenerate pivots the solver switches to Bland's rule until it makes
//! progress again.
//!
//! Duals follow the usual sign convention for minimization: `y_i >= 0` on
//! `>=` rows and `y_i <= 0` on `<=` rows.

use std::fmt::Write as _;

use thiserror::Error;

pub const TOL_FEAS: f64 = 1e-7;
pub const TOL_DUAL: f64 = 1e-7;
const TOL_PIVOT: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("variable {0} does not exist")]
    UnknownVariable(usize),
    #[error("row {0} does not exist")]
    UnknownRow(usize),
    #[error("variable {var}: lower bound {lower} exceeds upper bound {upper}")]
    BoundInversion { var: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
}

/// A linear program with a column-major sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(rows: Vec<(RowSense, f64)>) -> Result<Self, LpError> {
        if rows.iter().any(|(_, b)| !b.is_finite()) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        let (senses, rhs) = rows.into_iter().unzip();
        Ok(LpProblem {
            senses,
            rhs,
            cost: Vec::new(),
            columns: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        })
    }

    /// Adds a variable; entries with the same row are summed.
    pub fn add_column(
        &mut self,
        cost: f64,
        entries: &[(usize, f64)],
        lower: f64,
        upper: f64,
    ) -> Result<usize, LpError> {
        let var = self.cost.len();
        if !cost.is_finite() || entries.iter().any(|(_, a)| !a.is_finite()) {
            return Err(LpError::NonFinite("column"));
        }
        if lower.is_nan() || upper.is_nan() || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(LpError::NonFinite("bounds"));
        }
        if lower > upper {
            return Err(LpError::BoundInversion { var, lower, upper });
        }
        let mut col: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for &(r, a) in entries {
            if r >= self.senses.len() {
                return Err(LpError::UnknownRow(r));
            }
            match col.iter_mut().find(|(rr, _)| *rr == r) {
                Some(e) => e.1 += a,
                None => col.push((r, a)),
            }
        }
        col.sort_by_key(|e| e.0);
        col.retain(|e| e.1 != 0.0);
        self.cost.push(cost);
        self.columns.push(col);
        self.lower.push(lower);
        self.upper.push(upper);
        Ok(var)
    }

    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.cost[var]
    }

    pub fn column(&self, var: usize) -> &[(usize, f64)] {
        &self.columns[var]
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn row(&self, row: usize) -> (RowSense, f64) {
        (self.senses[row], self.rhs[row])
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if var >= self.num_vars() {
            return Err(LpError::UnknownVariable(var));
        }
        if lower > upper {
            return Err(LpError::BoundInversion { var, lower, upper });
        }
        self.lower[var] = lower;
        self.upper[var] = upper;
        Ok(())
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                act[r] += a * x[j];
            }
        }
        act
    }

    /// Writes the problem in CPLEX LP text format.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        for (j, &c) in self.cost.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(out, " {} {} x{j}", if c < 0.0 { "-" } else { "+" }, c.abs());
            }
        }
        out.push_str("\nSubject To\n");
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_rows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                rows[r].push((j, a));
            }
        }
        for (r, terms) in rows.iter().enumerate() {
            let _ = write!(out, " r{r}:");
            if terms.is_empty() {
                out.push_str(" 0 x0");
            }
            for &(j, a) in terms {
                let _ = write!(out, " {} {} x{j}", if a < 0.0 { "-" } else { "+" }, a.abs());
            }
            let op = match self.senses[r] {
                RowSense::Le => "<=",
                RowSense::Ge => ">=",
                RowSense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", self.rhs[r]);
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_vars() {
            let (l, u) = (self.lower[j], self.upper[j]);
            match (l.is_finite(), u.is_finite()) {
                (true, true) => {
                    let _ = writeln!(out, " {l} <= x{j} <= {u}");
                }
                (true, false) => {
                    let _ = writeln!(out, " x{j} >= {l}");
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= x{j} <= {u}");
                }
                (false, false) => {
                    let _ = writeln!(out, " x{j} free");
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values.
    pub x: Vec<f64>,
    /// Row duals.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// Basis snapshot for warm starts. Variables `0..m` are the row logicals,
/// `m + j` the structurals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    head: Vec<usize>,
    states: Vec<VarState>,
}

/// Solver state bound to one problem; keeps its basis between solves.
#[derive(Debug, Clone)]
pub struct LpSolver {
    problem: LpProblem,
    head: Vec<usize>,
    states: Vec<VarState>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    factor_valid: bool,
    pivots_since_refactor: usize,
    pub max_iterations: usize,
}

impl LpSolver {
    pub fn new(problem: LpProblem) -> Self {
        let mut s = LpSolver {
            problem,
            head: Vec::new(),
            states: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            factor_valid: false,
            pivots_since_refactor: 0,
            max_iterations: 1_000_000,
        };
        s.slack_basis();
        s
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    fn m(&self) -> usize {
        self.problem.num_rows()
    }

    fn slack_basis(&mut self) {
        let m = self.m();
        self.head = (0..m).collect();
        self.states = vec![VarState::Basic; m];
        for j in 0..self.problem.num_vars() {
            let st = self.default_state(m + j);
            self.states.push(st);
        }
        self.factor_valid = false;
    }

    fn default_state(&self, var: usize) -> VarState {
        let (l, u) = self.var_bounds(var);
        if l.is_finite() {
            VarState::AtLower
        } else if u.is_finite() {
            VarState::AtUpper
        } else {
            VarState::Free
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            head: self.head.clone(),
            states: self.states.clone(),
        }
    }

    /// Installs a basis taken from a solver on a problem with the same rows
    /// and a prefix of the same columns. Invalid snapshots are ignored.
    pub fn set_basis(&mut self, basis: &Basis) {
        let m = self.m();
        let total = m + self.problem.num_vars();
        if basis.head.len() != m || basis.states.len() > total {
            return;
        }
        self.head = basis.head.clone();
        self.states = basis.states.clone();
        for v in self.states.len()..total {
            let st = self.default_state(v);
            self.states.push(st);
        }
        self.factor_valid = false;
    }

    pub fn add_column(
        &mut self,
        cost: f64,
        entries: &[(usize, f64)],
        lower: f64,
        upper: f64,
    ) -> Result<usize, LpError> {
        let j = self.problem.add_column(cost, entries, lower, upper)?;
        let st = self.default_state(self.m() + j);
        self.states.push(st);
        Ok(j)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        self.problem.set_bounds(var, lower, upper)
    }

    /// Changes a structural upper bound in place; the next solve warm-starts.
    pub fn fix_variable_upper(&mut self, var: usize, new_upper: f64) -> Result<(), LpError> {
        if var >= self.problem.num_vars() {
            return Err(LpError::UnknownVariable(var));
        }
        let lower = self.problem.lower[var];
        self.problem.set_bounds(var, lower, new_upper)
    }

    #[inline]
    fn var_bounds(&self, var: usize) -> (f64, f64) {
        let m = self.m();
        if var < m {
            match self.problem.senses[var] {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            }
        } else {
            let j = var - m;
            (self.problem.lower[j], self.problem.upper[j])
        }
    }

    #[inline]
    fn var_cost(&self, var: usize) -> f64 {
        let m = self.m();
        if var < m {
            0.0
        } else {
            self.problem.cost[var - m]
        }
    }

    /// Calls `f(row, coef)` for each nonzero of the column of `var`.
    #[inline]
    fn for_column(&self, var: usize, mut f: impl FnMut(usize, f64)) {
        let m = self.m();
        if var < m {
            f(var, 1.0);
        } else {
            for &(r, a) in &self.problem.columns[var - m] {
                f(r, a);
            }
        }
    }

    fn nonbasic_value(&self, var: usize) -> f64 {
        let (l, u) = self.var_bounds(var);
        match self.states[var] {
            VarState::AtLower => l,
            VarState::AtUpper => u,
            VarState::Free | VarState::Basic => 0.0,
        }
    }

    /// Keeps nonbasic states consistent with the current (possibly changed)
    /// bounds.
    fn repair_states(&mut self) {
        for v in 0..self.states.len() {
            let (l, u) = self.var_bounds(v);
            let st = self.states[v];
            let fixed = match st {
                VarState::Basic => st,
                VarState::AtLower if l.is_finite() => st,
                VarState::AtUpper if u.is_finite() => st,
                VarState::Free if !l.is_finite() && !u.is_finite() => st,
                _ => self.default_state(v),
            };
            self.states[v] = fixed;
        }
    }

    /// Dense Gauss-Jordan inversion of the basis matrix. Returns false when
    /// the basis is singular.
    fn refactor(&mut self) -> bool {
        let m = self.m();
        let mut a = vec![0.0; m * m];
        for (pos, &var) in self.head.iter().enumerate() {
            self.for_column(var, |r, v| a[r * m + pos] = v);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].abs();
            for r in (col + 1)..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if piv != col {
                for c in 0..m {
                    a.swap(col * m + c, piv * m + c);
                    inv.swap(col * m + c, piv * m + c);
                }
            }
            let p = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f != 0.0 {
                    for c in 0..m {
                        a[r * m + c] -= f * a[col * m + c];
                        inv[r * m + c] -= f * inv[col * m + c];
                    }
                }
            }
        }
        // rows of `inv` now correspond to basis positions
        self.binv = inv;
        self.factor_valid = true;
        self.pivots_since_refactor = 0;
        true
    }

    fn compute_xb(&mut self) {
        let m = self.m();
        let mut rhs = self.problem.rhs.clone();
        for v in 0..self.states.len() {
            if self.states[v] == VarState::Basic {
                continue;
            }
            let x = self.nonbasic_value(v);
            if x != 0.0 {
                self.for_column(v, |r, a| rhs[r] -= a * x);
            }
        }
        self.xb = (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * rhs[k]).sum())
            .collect();
    }

    fn ensure_factor(&mut self) {
        if self.factor_valid && self.pivots_since_refactor < REFACTOR_EVERY {
            return;
        }
        if !self.refactor() {
            self.slack_basis();
            let ok = self.refactor();
            debug_assert!(ok);
        }
    }

    /// `y = c_B B^-1` for the given basic costs.
    fn btran(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut y = vec![0.0; m];
        for (pos, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                let row = &self.binv[pos * m..(pos + 1) * m];
                for (yi, &b) in y.iter_mut().zip(row) {
                    *yi += c * b;
                }
            }
        }
        y
    }

    /// `B^-1 a_var`.
    fn ftran(&self, var: usize) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; m];
        self.for_column(var, |r, a| {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.binv[i * m + r] * a;
            }
        });
        out
    }

    fn reduced_cost(&self, var: usize, cost: f64, y: &[f64]) -> f64 {
        let mut d = cost;
        self.for_column(var, |r, a| d -= y[r] * a);
        d
    }

    fn pivot(&mut self, row: usize, alpha: &[f64]) {
        let m = self.m();
        let p = alpha[row];
        for c in 0..m {
            self.binv[row * m + c] /= p;
        }
        for i in 0..m {
            if i == row || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            for c in 0..m {
                let v = self.binv[row * m + c];
                if v != 0.0 {
                    self.binv[i * m + c] -= f * v;
                }
            }
        }
        self.pivots_since_refactor += 1;
    }

    fn infeasibility(&self, pos: usize) -> f64 {
        let (l, u) = self.var_bounds(self.head[pos]);
        let x = self.xb[pos];
        if x < l - TOL_FEAS {
            l - x
        } else if x > u + TOL_FEAS {
            x - u
        } else {
            0.0
        }
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> LpSolution {
        let m = self.m();
        let total = m + self.problem.num_vars();
        debug_assert_eq!(self.states.len(), total);
        self.repair_states();
        self.ensure_factor();
        self.compute_xb();

        let mut iterations = 0usize;
        let mut degenerate_run = 0usize;
        let mut status = LpStatus::IterationLimit;
        let mut phase1_retries = 0usize;

        while iterations < self.max_iterations {
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.ensure_factor();
                self.compute_xb();
            }
            // phase selection
            let mut cb = vec![0.0; m];
            let mut phase1 = false;
            for pos in 0..m {
                let (l, u) = self.var_bounds(self.head[pos]);
                let x = self.xb[pos];
                if x < l - TOL_FEAS {
                    cb[pos] = -1.0;
                    phase1 = true;
                } else if x > u + TOL_FEAS {
                    cb[pos] = 1.0;
                    phase1 = true;
                }
            }
            if !phase1 {
                for (pos, c) in cb.iter_mut().enumerate() {
                    *c = self.var_cost(self.head[pos]);
                }
            }
            let y = self.btran(&cb);
            let bland = degenerate_run >= STALL_LIMIT;

            // pricing
            let mut entering: Option<(usize, f64, f64)> = None; // (var, d, direction)
            for v in 0..total {
                let st = self.states[v];
                if st == VarState::Basic {
                    continue;
                }
                let (l, u) = self.var_bounds(v);
                if l == u {
                    continue;
                }
                let cost = if phase1 { 0.0 } else { self.var_cost(v) };
                let d = self.reduced_cost(v, cost, &y);
                let dir = match st {
                    VarState::AtLower if d < -TOL_DUAL => 1.0,
                    VarState::AtUpper if d > TOL_DUAL => -1.0,
                    VarState::Free if d.abs() > TOL_DUAL => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((v, d, dir));
                    break;
                }
                if entering.is_none_or(|(_, bd, _)| d.abs() > bd.abs()) {
                    entering = Some((v, d, dir));
                }
            }
            let Some((q, _dq, dir)) = entering else {
                if phase1 {
                    status = LpStatus::Infeasible;
                } else {
                    status = LpStatus::Optimal;
                }
                break;
            };

            let alpha = self.ftran(q);
            // ratio test
            let (lq, uq) = self.var_bounds(q);
            let mut step = if lq.is_finite() && uq.is_finite() {
                uq - lq
            } else {
                f64::INFINITY
            };
            let mut leave: Option<(usize, VarState)> = None;
            let mut leave_alpha = 0.0f64;
            for pos in 0..m {
                let a = alpha[pos];
                if a.abs() <= TOL_PIVOT {
                    continue;
                }
                let rate = -dir * a;
                let var = self.head[pos];
                let (l, u) = self.var_bounds(var);
                let x = self.xb[pos];
                let (limit, bound) = if rate < 0.0 {
                    if x > u + TOL_FEAS {
                        ((x - u) / -rate, VarState::AtUpper)
                    } else if x < l - TOL_FEAS || !l.is_finite() {
                        continue;
                    } else {
                        (((x - l) / -rate).max(0.0), VarState::AtLower)
                    }
                } else if x < l - TOL_FEAS {
                    ((l - x) / rate, VarState::AtLower)
                } else if x > u + TOL_FEAS || !u.is_finite() {
                    continue;
                } else {
                    (((u - x) / rate).max(0.0), VarState::AtUpper)
                };
                let take = match leave {
                    None => limit <= step,
                    Some((lp, _)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            if bland {
                                self.head[pos] < self.head[lp]
                            } else {
                                a.abs() > leave_alpha.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if take {
                    step = if leave.is_none() { limit } else { limit.min(step) };
                    leave = Some((pos, bound));
                    leave_alpha = a;
                }
            }

            if step == f64::INFINITY {
                if phase1 {
                    // numerical trouble: rebuild and retry once
                    phase1_retries += 1;
                    if phase1_retries > 3 {
                        status = LpStatus::Infeasible;
                        break;
                    }
                    self.factor_valid = false;
                    self.ensure_factor();
                    self.compute_xb();
                    continue;
                }
                status = LpStatus::Unbounded;
                break;
            }

            iterations += 1;
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            for pos in 0..m {
                if alpha[pos] != 0.0 {
                    self.xb[pos] -= dir * step * alpha[pos];
                }
            }
            match leave {
                None => {
                    // bound flip
                    self.states[q] = if dir > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some((r, bound)) => {
                    let entering_value = self.nonbasic_value(q) + dir * step;
                    let out = self.head[r];
                    let (l, u) = self.var_bounds(out);
                    self.states[out] = match bound {
                        VarState::AtLower if l.is_finite() => VarState::AtLower,
                        VarState::AtUpper if u.is_finite() => VarState::AtUpper,
                        _ => self.default_state(out),
                    };
                    self.states[q] = VarState::Basic;
                    self.head[r] = q;
                    self.pivot(r, &alpha);
                    self.xb[r] = entering_value;
                }
            }
        }

        self.extract(status, iterations)
    }

    fn extract(&mut self, status: LpStatus, iterations: usize) -> LpSolution {
        let m = self.m();
        let nv = self.problem.num_vars();
        // a fresh factorization keeps reported values clean
        if self.pivots_since_refactor > 0 {
            self.factor_valid = false;
            self.ensure_factor();
            self.compute_xb();
        }
        let mut x = vec![0.0; nv];
        for j in 0..nv {
            x[j] = self.nonbasic_value(m + j);
        }
        for (pos, &var) in self.head.iter().enumerate() {
            if var >= m {
                x[var - m] = self.xb[pos];
            }
        }
        let cb: Vec<f64> = self.head.iter().map(|&v| self.var_cost(v)).collect();
        let duals = self.btran(&cb);
        let objective = x.iter().zip(&self.problem.cost).map(|(a, c)| a * c).sum();
        if status != LpStatus::Optimal {
            debug_assert!((0..m).all(|p| self.infeasibility(p) >= 0.0));
        }
        LpSolution {
            status,
            x,
            duals,
            objective,
            iterations,
        }
    }
}

/// One-shot solve, optionally warm-started from a basis.
pub fn solve_lp(problem: &LpProblem, warm_basis: Option<&Basis>) -> (LpSolution, Basis) {
    let mut solver = LpSolver::new(problem.clone());
    if let Some(b) = warm_basis {
        solver.set_basis(b);
    }
    let sol = solver.solve();
    (sol, solver.basis())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 3.0)]).unwrap();
        p.add_column(1.0, &[(0, 1.0)], 0.0, 10.0).unwrap();
        let (s, _) = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!((s.duals[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    /// Restricted master of two items in one scenario with singleton columns:
    /// min F s.t. X1 >= 1, X2 >= 1, X1 + X2 - F <= 0. Enumerating bases by
    /// hand gives F = 2 with alpha = (a, 1 - a) for a in [0, 1] and beta = -1.
    #[test]
    fn toy_master_problem() {
        let mut p = LpProblem::new(vec![
            (RowSense::Ge, 1.0),
            (RowSense::Ge, 1.0),
            (RowSense::Le, 0.0),
        ])
        .unwrap();
        p.add_column(0.0, &[(0, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        p.add_column(0.0, &[(1, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        p.add_column(1.0, &[(2, -1.0)], 0.0, 2.0).unwrap();
        let (s, _) = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9);
        let (a1, a2, b) = (s.duals[0], s.duals[1], s.duals[2]);
        assert!(a1 >= -1e-9 && a2 >= -1e-9 && b <= 1e-9);
        assert!((b + 1.0).abs() < 1e-9);
        // reduced costs of both singleton columns are zero
        assert!((a1 + b).abs() < 1e-9);
        assert!((a2 + b).abs() < 1e-9);
    }

    #[test]
    fn degenerate_duplicate_columns_terminate() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 1.0), (RowSense::Ge, 1.0), (RowSense::Le, 0.0)]).unwrap();
        for _ in 0..6 {
            p.add_column(0.0, &[(0, 1.0), (1, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
            p.add_column(0.0, &[(0, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        }
        p.add_column(1.0, &[(2, -1.0)], 0.0, 10.0).unwrap();
        let (s, _) = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 5.0)]).unwrap();
        p.add_column(1.0, &[(0, 1.0)], 0.0, 2.0).unwrap();
        assert_eq!(solve_lp(&p, None).0.status, LpStatus::Infeasible);

        let mut p = LpProblem::new(vec![(RowSense::Ge, 1.0)]).unwrap();
        p.add_column(-1.0, &[(0, 1.0)], 0.0, f64::INFINITY).unwrap();
        assert_eq!(solve_lp(&p, None).0.status, LpStatus::Unbounded);
    }

    #[test]
    fn fixing_basic_variable_and_restoring() {
        // min -x - y  s.t. x + y <= 4, x <= 3 (bound), y <= 3 (bound)
        let mut p = LpProblem::new(vec![(RowSense::Le, 4.0)]).unwrap();
        p.add_column(-1.0, &[(0, 1.0)], 0.0, 3.0).unwrap();
        p.add_column(-2.0, &[(0, 1.0)], 0.0, 3.0).unwrap();
        let mut solver = LpSolver::new(p);
        let s = solver.solve();
        assert!((s.objective + 7.0).abs() < 1e-9);
        solver.fix_variable_upper(0, 0.0).unwrap();
        let s = solver.solve();
        assert!(s.x[0].abs() < 1e-9);
        assert!((s.objective + 6.0).abs() < 1e-9);
        solver.fix_variable_upper(0, 3.0).unwrap();
        let s = solver.solve();
        assert!((s.objective + 7.0).abs() < 1e-9);
        assert!(matches!(
            solver.fix_variable_upper(0, -1.0),
            Err(LpError::BoundInversion { .. })
        ));
        assert!(solver.fix_variable_upper(9, 0.0).is_err());
    }

    #[test]
    fn uncoverable_row_is_infeasible() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 1.0), (RowSense::Ge, 1.0)]).unwrap();
        p.add_column(1.0, &[(0, 1.0)], 0.0, 1.0).unwrap();
        p.add_column(1.0, &[(1, 1.0)], 0.0, 1.0).unwrap();
        let mut solver = LpSolver::new(p);
        assert_eq!(solver.solve().status, LpStatus::Optimal);
        solver.fix_variable_upper(1, 0.0).unwrap();
        assert_eq!(solver.solve().status, LpStatus::Infeasible);
    }

    #[test]
    fn warm_start_after_adding_column() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 1.0), (RowSense::Ge, 1.0), (RowSense::Le, 0.0)]).unwrap();
        p.add_column(0.0, &[(0, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        p.add_column(0.0, &[(1, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        p.add_column(1.0, &[(2, -1.0)], 0.0, 2.0).unwrap();
        let mut solver = LpSolver::new(p);
        assert!((solver.solve().objective - 2.0).abs() < 1e-9);
        solver.add_column(0.0, &[(0, 1.0), (1, 1.0), (2, 1.0)], 0.0, 1.0).unwrap();
        let s = solver.solve();
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_free_variables() {
        // min x + y s.t. x - y = 1, x + y >= 3, y free
        let mut p = LpProblem::new(vec![(RowSense::Eq, 1.0), (RowSense::Ge, 3.0)]).unwrap();
        p.add_column(1.0, &[(0, 1.0), (1, 1.0)], 0.0, f64::INFINITY).unwrap();
        p.add_column(1.0, &[(0, -1.0), (1, 1.0)], f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let (s, _) = solve_lp(&p, None);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lp_format_dump() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 3.0)]).unwrap();
        p.add_column(1.5, &[(0, 2.0)], 0.0, 10.0).unwrap();
        let text = p.to_lp_format();
        assert!(text.starts_with("Minimize\n obj: + 1.5 x0\n"));
        assert!(text.contains(" r0: + 2 x0 >= 3\n"));
        assert!(text.contains(" 0 <= x0 <= 10\n"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn rejects_malformed_input() {
        let mut p = LpProblem::new(vec![(RowSense::Ge, 3.0)]).unwrap();
        assert!(p.add_column(1.0, &[(4, 1.0)], 0.0, 1.0).is_err());
        assert!(p.add_column(f64::NAN, &[(0, 1.0)], 0.0, 1.0).is_err());
        assert!(p.add_column(1.0, &[(0, 1.0)], 2.0, 1.0).is_err());
        assert!(LpProblem::new(vec![(RowSense::Le, f64::INFINITY)]).is_err());
    }
}
