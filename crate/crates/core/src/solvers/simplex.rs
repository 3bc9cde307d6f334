//! Dense two-phase tableau simplex with Bland's pivoting rule.
//!
//! Programs here are tiny (a few dozen variables), so the solver favours
//! determinism over speed: the entering column is always the lowest-index
//! improving column and ratio-test ties go to the lowest-index basic variable.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Feasibility tolerance on constraints and on the phase-one objective.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective · x` subject to `constraints` and `x >= lower_bounds`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<f64>,
}

impl LinearProgram {
    /// A program over `n_vars` non-negative variables.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![0.0; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.n_vars());
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Le, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Ge, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (xi, lb) in x.iter().zip(&self.lower_bounds) {
            worst = worst.max(lb - xi);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    fn is_well_formed(&self) -> bool {
        let n = self.n_vars();
        self.lower_bounds.len() == n
            && self.objective.iter().all(|c| c.is_finite())
            && self.lower_bounds.iter().all(|b| b.is_finite())
            && self
                .constraints
                .iter()
                .all(|c| c.coeffs.len() == n && c.rhs.is_finite() && c.coeffs.iter().all(|a| a.is_finite()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    Malformed,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => f.write_str("linear program is infeasible"),
            LpError::Unbounded => f.write_str("linear program is unbounded"),
            LpError::Malformed => f.write_str("linear program is malformed"),
        }
    }
}

impl core::error::Error for LpError {}

struct Tableau {
    /// `rows` constraint rows followed by the objective row; the last column is the rhs.
    cells: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.cells[r][self.n_cols]
    }

    fn n_rows(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.cells[row][col];
        for v in self.cells[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.cells[row].clone();
        for (r, line) in self.cells.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Loads `costs` (maximize) into the objective row as reduced costs.
    fn set_objective(&mut self, costs: &[f64]) {
        let obj = self.n_rows();
        let mut row = vec![0.0; self.n_cols + 1];
        row[..costs.len()].copy_from_slice(costs);
        for r in 0..self.n_rows() {
            let cb = costs.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (v, a) in row.iter_mut().zip(&self.cells[r]) {
                    *v -= cb * a;
                }
            }
        }
        self.cells[obj] = row;
    }

    /// Bland-rule iterations over columns `< allowed`; objective value is `-cells[obj][rhs]`.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpError> {
        let obj = self.n_rows();
        loop {
            let entering = (0..allowed).find(|&j| self.cells[obj][j] > COST_TOL);
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.n_rows() {
                let a = self.cells[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(LpError::Unbounded),
            }
        }
    }
}

/// Solves `lp`, returning a vertex-optimal point.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    if !lp.is_well_formed() {
        return Err(LpError::Malformed);
    }
    let n = lp.n_vars();

    // Shift x = y + lb and make every rhs non-negative.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            let shift: f64 = c.coeffs.iter().zip(&lp.lower_bounds).map(|(a, b)| a * b).sum();
            (c.coeffs.clone(), c.relation, c.rhs - shift)
        })
        .collect();
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            coeffs.iter_mut().for_each(|a| *a = -*a);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = n + n_slack;
    let n_cols = art_start + n_art;

    let mut cells = vec![vec![0.0; n_cols + 1]; m + 1];
    let mut basis = vec![0; m];
    let (mut next_slack, mut next_art) = (n, art_start);
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        cells[r][..n].copy_from_slice(coeffs);
        cells[r][n_cols] = *rhs;
        match rel {
            Relation::Le => {
                cells[r][next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                cells[r][next_slack] = -1.0;
                next_slack += 1;
                cells[r][next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                cells[r][next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }
    let mut t = Tableau { cells, basis, n_cols };

    if n_art > 0 {
        let mut phase1 = vec![0.0; n_cols];
        phase1[art_start..].iter_mut().for_each(|c| *c = -1.0);
        t.set_objective(&phase1);
        t.optimize(n_cols)?;
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        let infeasibility = t.cells[m][n_cols];
        if infeasibility > FEAS_TOL * scale {
            return Err(LpError::Infeasible);
        }
        // Drive artificials out of the basis; drop rows that are redundant.
        let mut r = 0;
        while r < t.n_rows() {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&j| t.cells[r][j].abs() > PIVOT_TOL) {
                    Some(col) => {
                        t.pivot(r, col);
                        r += 1;
                    }
                    None => {
                        t.cells.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut costs = vec![0.0; n_cols];
    costs[..n].copy_from_slice(&lp.objective);
    t.set_objective(&costs);
    t.optimize(art_start)?;

    let mut x = lp.lower_bounds.clone();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            let v = t.rhs(r);
            x[b] += if v < 0.0 && v > -FEAS_TOL { 0.0 } else { v };
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, value })
}
