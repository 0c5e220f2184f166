//! Linear programming: problem container, a bounded-variable revised simplex,
//! explicit LP duals and a complementary-slackness audit.

mod dual;
mod simplex;
mod slackness;

pub use dual::{dual_price_range, dual_problem, lexicographic_min, DualMap};
pub use simplex::{farkas_margin, solve_lp, solve_lp_warm, Basis};
pub use slackness::{check_complementary_slackness, Condition, SlacknessReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Rate of change of the optimal objective per unit increase of each rhs.
    pub duals: Vec<f64>,
    /// `c_j − Σ_r a_rj·dual_r`, in the problem's own sense.
    pub reduced_costs: Vec<f64>,
    /// Infeasible: row multipliers `y` with `inf (A^T y)·x − y·s > 0` over the
    /// variable and row-bound boxes. Unbounded: an improving primal ray.
    pub certificate: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem {
            sense,
            cost: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.cost.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension(format!(
                "{} costs, {} lower bounds, {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::Dimension("non-finite cost".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::Dimension(format!(
                    "variable {j} has bounds [{l}, {u}]"
                )));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::Dimension(format!("row {r} has a non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(Error::Dimension(format!(
                        "row {r} references variable {j} with coefficient {a}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn row_activity(&self, r: usize, x: &[f64]) -> f64 {
        self.rows[r].coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest violation of any row or variable bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((lo, hi), v) in self.lower.iter().zip(&self.upper).zip(x) {
            worst = worst.max(lo - v).max(v - hi);
        }
        for (r, row) in self.rows.iter().enumerate() {
            let act = self.row_activity(r, x);
            let v = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `Σ b_r y_r` plus bound terms from the reduced costs; equals the primal
    /// objective at an optimal basis.
    pub fn dual_objective(&self, p: &LpProblem) -> f64 {
        let mut z: f64 = p
            .rows
            .iter()
            .zip(&self.duals)
            .map(|(row, y)| row.rhs * y)
            .sum();
        for j in 0..p.n_vars() {
            let d = self.reduced_costs[j];
            if d == 0.0 {
                continue;
            }
            let (l, u) = (p.lower[j], p.upper[j]);
            let at_upper = (d < 0.0) == (p.sense == Sense::Minimize);
            let bound = if at_upper { u } else { l };
            let bound = if bound.is_finite() {
                bound
            } else if l.is_finite() {
                l
            } else if u.is_finite() {
                u
            } else {
                0.0
            };
            z += d * bound;
        }
        z
    }
}
