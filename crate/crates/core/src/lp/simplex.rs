//! Revised primal simplex for packing-form LPs
//! `max cᵀy  s.t.  M y ≤ h,  y ≥ 0` with `h ≥ 0`.
//!
//! With `h ≥ 0` the all-slack basis is feasible, so there is no phase I, and
//! appending a column keeps the current basis feasible: the cutting-plane
//! loop adds one column per cut and resumes from the previous optimum.
//! Covering problems (`min cᵀz, A z ≥ b, 0 ≤ z ≤ u`, `c ≥ 0`) are solved via
//! this form of their dual; the covering solution is read off the row prices.

use serde::Serialize;
use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("pivot limit {0} reached")]
    IterationLimit(usize),
    #[error("malformed problem: {0}")]
    InvalidProblem(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Slack(usize),
    Col(usize),
}

#[derive(Clone, Debug)]
struct Column {
    entries: Vec<(usize, f64)>,
    cost: f64,
}

/// Packing-form LP that can grow by columns between solves.
#[derive(Clone, Debug)]
pub struct PackingSimplex {
    h: Vec<f64>,
    cols: Vec<Column>,
    basis: Vec<Var>,
    // row-major B⁻¹
    binv: Vec<f64>,
    beta: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl PackingSimplex {
    /// Empty problem with the given row bounds (all must be finite and ≥ 0).
    pub fn new(h: Vec<f64>) -> Result<Self, SimplexError> {
        if let Some(v) = h.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(SimplexError::InvalidProblem(format!(
                "row bound {v} is not finite and nonnegative"
            )));
        }
        let r = h.len();
        let mut binv = vec![0.0; r * r];
        for i in 0..r {
            binv[i * r + i] = 1.0;
        }
        Ok(Self {
            beta: h.clone(),
            h,
            cols: Vec::new(),
            basis: (0..r).map(Var::Slack).collect(),
            binv,
            pivots: 0,
            since_refactor: 0,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.h.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Total pivots performed so far.
    pub fn pivots(&self) -> usize {
        self.pivots
    }

    /// Appends a column (sparse `(row, value)` entries) and returns its index.
    pub fn add_column(&mut self, entries: Vec<(usize, f64)>, cost: f64) -> usize {
        debug_assert!(entries.iter().all(|&(r, v)| r < self.num_rows() && v.is_finite()));
        self.cols.push(Column { entries, cost });
        self.cols.len() - 1
    }

    fn cost(&self, v: Var) -> f64 {
        match v {
            Var::Slack(_) => 0.0,
            Var::Col(j) => self.cols[j].cost,
        }
    }

    // Bland order: slacks first, then columns.
    fn order(&self, v: Var) -> usize {
        match v {
            Var::Slack(i) => i,
            Var::Col(j) => self.num_rows() + j,
        }
    }

    /// Row prices `c_B B⁻¹`.
    pub fn prices(&self) -> Vec<f64> {
        let r = self.num_rows();
        let mut pi = vec![0.0; r];
        for (i, &v) in self.basis.iter().enumerate() {
            let c = self.cost(v);
            if c != 0.0 {
                for (k, p) in pi.iter_mut().enumerate() {
                    *p += c * self.binv[i * r + k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, v: Var, pi: &[f64]) -> f64 {
        match v {
            Var::Slack(i) => -pi[i],
            Var::Col(j) => {
                let col = &self.cols[j];
                col.cost - col.entries.iter().map(|&(r, a)| pi[r] * a).sum::<f64>()
            }
        }
    }

    fn ftran(&self, v: Var) -> Vec<f64> {
        let r = self.num_rows();
        match v {
            Var::Slack(k) => (0..r).map(|i| self.binv[i * r + k]).collect(),
            Var::Col(j) => (0..r)
                .map(|i| {
                    self.cols[j]
                        .entries
                        .iter()
                        .map(|&(k, a)| self.binv[i * r + k] * a)
                        .sum()
                })
                .collect(),
        }
    }

    /// Rebuilds B⁻¹ and the basic values from scratch (Gauss-Jordan with
    /// partial pivoting) to stop error accumulation.
    fn refactor(&mut self) {
        let r = self.num_rows();
        let mut b = vec![0.0; r * r];
        for (i, &v) in self.basis.iter().enumerate() {
            match v {
                Var::Slack(k) => b[k * r + i] = 1.0,
                Var::Col(j) => {
                    for &(k, a) in &self.cols[j].entries {
                        b[k * r + i] += a;
                    }
                }
            }
        }
        let mut inv = vec![0.0; r * r];
        for i in 0..r {
            inv[i * r + i] = 1.0;
        }
        for c in 0..r {
            let p = (c..r)
                .max_by(|&x, &y| b[x * r + c].abs().total_cmp(&b[y * r + c].abs()))
                .unwrap();
            if b[p * r + c].abs() < 1e-12 {
                // numerically singular; keep the product-form inverse
                return;
            }
            for k in 0..r {
                b.swap(p * r + k, c * r + k);
                inv.swap(p * r + k, c * r + k);
            }
            let d = b[c * r + c];
            for k in 0..r {
                b[c * r + k] /= d;
                inv[c * r + k] /= d;
            }
            for i in 0..r {
                let f = b[i * r + c];
                if i != c && f != 0.0 {
                    for k in 0..r {
                        b[i * r + k] -= f * b[c * r + k];
                        inv[i * r + k] -= f * inv[c * r + k];
                    }
                }
            }
        }
        self.binv = inv;
        self.beta = (0..r)
            .map(|i| (0..r).map(|k| self.binv[i * r + k] * self.h[k]).sum::<f64>().max(0.0))
            .collect();
        self.since_refactor = 0;
    }

    fn pivot(&mut self, row: usize, entering: Var, alpha: &[f64]) {
        let r = self.num_rows();
        let ap = alpha[row];
        for k in 0..r {
            self.binv[row * r + k] /= ap;
        }
        self.beta[row] /= ap;
        for (i, &f) in alpha.iter().enumerate().take(r) {
            if i != row && f != 0.0 {
                for k in 0..r {
                    self.binv[i * r + k] -= f * self.binv[row * r + k];
                }
                self.beta[i] -= f * self.beta[row];
                if self.beta[i] < 0.0 && self.beta[i] > -1e-11 {
                    self.beta[i] = 0.0;
                }
            }
        }
        self.basis[row] = entering;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Runs primal simplex from the current basis to optimality.
    /// Dantzig pricing; after `2·(rows + cols)` consecutive degenerate pivots
    /// it switches to Bland's rule, which cannot cycle.
    pub fn solve(&mut self) -> Result<f64, SimplexError> {
        let r = self.num_rows();
        let n = self.num_cols();
        let bland_after = 2 * (r + n);
        let limit = 50 * (r + n) + 1000;
        let mut degenerate = 0usize;
        let mut in_basis = vec![false; r + n];
        for &v in &self.basis {
            in_basis[self.order(v)] = true;
        }
        for _ in 0..limit {
            let bland = degenerate >= bland_after;
            let pi = self.prices();
            let mut entering: Option<(Var, f64)> = None;
            let candidates = (0..r).map(Var::Slack).chain((0..n).map(Var::Col));
            for v in candidates {
                if in_basis[self.order(v)] {
                    continue;
                }
                let d = self.reduced_cost(v, &pi);
                if d > OPT_TOL && entering.is_none_or(|(_, best)| d > best) {
                    entering = Some((v, d));
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(self.objective());
            };
            let alpha = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..r {
                if alpha[i] <= PIVOT_TOL {
                    continue;
                }
                let theta = self.beta[i].max(0.0) / alpha[i];
                let better = match leave {
                    None => true,
                    Some((p, t)) => {
                        if theta < t - 1e-12 {
                            true
                        } else if theta <= t + 1e-12 {
                            if bland {
                                self.order(self.basis[i]) < self.order(self.basis[p])
                            } else {
                                alpha[i] > alpha[p]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, theta));
                }
            }
            let Some((p, theta)) = leave else {
                return Err(SimplexError::Unbounded);
            };
            degenerate = if theta <= 1e-12 { degenerate + 1 } else { 0 };
            in_basis[self.order(self.basis[p])] = false;
            in_basis[self.order(q)] = true;
            self.pivot(p, q, &alpha);
        }
        Err(SimplexError::IterationLimit(limit))
    }

    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .map(|(&v, &b)| self.cost(v) * b)
            .sum()
    }

    /// Current value of every structural column.
    pub fn column_values(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.num_cols()];
        for (&v, &b) in self.basis.iter().zip(&self.beta) {
            if let Var::Col(j) = v {
                y[j] = b.max(0.0);
            }
        }
        y
    }
}

/// `min cost·z  s.t.  rows·z ≥ rhs,  0 ≤ z ≤ upper` with nonnegative costs.
/// `upper` entries may be `f64::INFINITY`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SimplexProblem {
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl SimplexProblem {
    fn check(&self) -> Result<(), SimplexError> {
        let n = self.cost.len();
        let bad = |msg: String| Err(SimplexError::InvalidProblem(msg));
        if self.upper.len() != n {
            return bad(format!("{} upper bounds for {n} variables", self.upper.len()));
        }
        if self.rhs.len() != self.rows.len() {
            return bad(format!("{} right-hand sides for {} rows", self.rhs.len(), self.rows.len()));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != n) {
            return bad(format!("row {i} has the wrong length"));
        }
        if self.rows.iter().flatten().chain(&self.rhs).any(|v| !v.is_finite()) {
            return bad("non-finite coefficient".into());
        }
        if self.cost.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return bad("costs must be finite and nonnegative".into());
        }
        if self.upper.iter().any(|u| u.is_nan() || *u < 0.0) {
            return bad("upper bounds must be nonnegative".into());
        }
        Ok(())
    }
}

/// Solves a covering problem through its packing dual
/// `max rhsᵀπ − upperᵀμ  s.t.  rowsᵀπ − μ ≤ cost,  π, μ ≥ 0`.
pub fn simplex_solve(problem: &SimplexProblem) -> Result<SimplexSolution, SimplexError> {
    problem.check()?;
    let n = problem.cost.len();
    let mut lp = PackingSimplex::new(problem.cost.clone())?;
    for (row, &b) in problem.rows.iter().zip(&problem.rhs) {
        let entries = row
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, &a)| (j, a))
            .collect();
        lp.add_column(entries, b);
    }
    for (j, &u) in problem.upper.iter().enumerate() {
        if u.is_finite() {
            lp.add_column(vec![(j, -1.0)], -u);
        }
    }
    let value = match lp.solve() {
        Ok(v) => v,
        Err(SimplexError::Unbounded) => return Err(SimplexError::Infeasible),
        Err(e) => return Err(e),
    };
    let x = lp
        .prices()
        .into_iter()
        .zip(&problem.upper)
        .map(|(p, &u)| p.clamp(0.0, u))
        .collect();
    debug_assert_eq!(n, problem.upper.len());
    Ok(SimplexSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(rows: Vec<Vec<f64>>, cost: Vec<f64>) -> SimplexProblem {
        let n = cost.len();
        SimplexProblem {
            rhs: vec![1.0; rows.len()],
            rows,
            cost,
            upper: vec![1.0; n],
        }
    }

    fn residual(p: &SimplexProblem, s: &SimplexSolution) -> f64 {
        p.rows
            .iter()
            .zip(&p.rhs)
            .map(|(r, b)| b - r.iter().zip(&s.x).map(|(a, x)| a * x).sum::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn no_constraints() {
        let s = simplex_solve(&unit(vec![], vec![1.0, 1.0])).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.x, vec![0.0, 0.0]);
    }

    #[test]
    fn single_covering_row() {
        let p = unit(vec![vec![1.0, 1.0]], vec![1.0, 1.0]);
        let s = simplex_solve(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(residual(&p, &s) <= 1e-9);
    }

    #[test]
    fn forfeit_variable_is_cheaper() {
        // x0 + y0 ≥ 1, min x0 + 0.4 y0
        let p = unit(vec![vec![1.0, 1.0]], vec![1.0, 0.4]);
        let s = simplex_solve(&p).unwrap();
        assert!((s.value - 0.4).abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
        assert!(s.x[0].abs() < 1e-12);
    }

    #[test]
    fn upper_bounds_bind() {
        // 2x ≥ 3 with x ≤ 1 is infeasible
        let p = SimplexProblem {
            rows: vec![vec![2.0]],
            rhs: vec![3.0],
            cost: vec![1.0],
            upper: vec![1.0],
        };
        assert_eq!(simplex_solve(&p), Err(SimplexError::Infeasible));
        // x0 + x1 ≥ 1.5, x0 cheap but capped at 1
        let p = SimplexProblem {
            rows: vec![vec![1.0, 1.0]],
            rhs: vec![1.5],
            cost: vec![1.0, 3.0],
            upper: vec![1.0, 1.0],
        };
        let s = simplex_solve(&p).unwrap();
        assert!((s.value - 2.5).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_cost_is_rejected() {
        let p = unit(vec![], vec![-1.0]);
        assert!(matches!(simplex_solve(&p), Err(SimplexError::InvalidProblem(_))));
    }

    /// Vertex enumeration oracle for tiny covering LPs in the unit box.
    fn brute(p: &SimplexProblem) -> f64 {
        // vertices of {Az ≥ b, 0 ≤ z ≤ 1} lie on n tight constraints;
        // a fine grid is enough for these tiny 0/1 instances
        let n = p.cost.len();
        let steps = 12usize;
        let mut best = f64::INFINITY;
        let total = (steps + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let z: Vec<f64> = (0..n)
                .map(|_| {
                    let v = (c % (steps + 1)) as f64 / steps as f64;
                    c /= steps + 1;
                    v
                })
                .collect();
            let ok = p
                .rows
                .iter()
                .zip(&p.rhs)
                .all(|(r, b)| r.iter().zip(&z).map(|(a, x)| a * x).sum::<f64>() >= b - 1e-12);
            if ok {
                best = best.min(z.iter().zip(&p.cost).map(|(x, c)| x * c).sum());
            }
        }
        best
    }

    #[test]
    fn matches_grid_search_on_small_covering_lps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(1..=3);
            let rows: Vec<Vec<f64>> = (0..rng.gen_range(0..5))
                .map(|_| {
                    let mut r: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_bool(0.5) as u8)).collect();
                    if r.iter().all(|a| *a == 0.0) {
                        r[0] = 1.0;
                    }
                    r
                })
                .collect();
            // grid of step 1/12 contains the half-integral optima of these LPs
            let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(1..4) as f64).collect();
            let p = unit(rows, cost);
            let s = simplex_solve(&p).unwrap();
            assert!(residual(&p, &s) <= 1e-9);
            assert!((s.value - brute(&p)).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn warm_start_after_adding_columns() {
        let mut lp = PackingSimplex::new(vec![1.0, 1.0, 1.0]).unwrap();
        lp.add_column(vec![(0, 1.0), (1, 1.0)], 1.0);
        assert!((lp.solve().unwrap() - 1.0).abs() < 1e-12);
        lp.add_column(vec![(1, 1.0), (2, 1.0)], 1.0);
        lp.add_column(vec![(0, 1.0), (2, 1.0)], 1.0);
        // odd-cycle packing: 3/2
        assert!((lp.solve().unwrap() - 1.5).abs() < 1e-12);
        let pi = lp.prices();
        assert!(pi.iter().all(|p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // many identical rows make every pivot degenerate
        let rows = vec![vec![1.0, 1.0, 0.0, 0.0]; 30]
            .into_iter()
            .chain(vec![vec![0.0, 1.0, 1.0, 1.0]; 30])
            .collect();
        let p = unit(rows, vec![1.0; 4]);
        let s = simplex_solve(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }
}
