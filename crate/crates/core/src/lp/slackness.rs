//! Complementary-slackness audit of a claimed optimal primal/dual pair.

use super::{LpProblem, LpSolution, LpStatus, Relation, Sense};
use crate::error::{Error, Result};

const PASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    /// `|dual_r · slack_r|`, or the size of a wrong-signed row dual.
    Row { row: usize, violation: f64 },
    /// `|d_j · (x_j − bound)|` with `d` recomputed from the duals, or the
    /// size of a reduced cost pointing at an infinite bound.
    Column { var: usize, violation: f64 },
}

impl Condition {
    pub fn violation(&self) -> f64 {
        match self {
            Condition::Row { violation, .. } | Condition::Column { violation, .. } => *violation,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SlacknessReport {
    pub max_violation: f64,
    pub conditions: Vec<Condition>,
}

impl SlacknessReport {
    pub fn pass(&self) -> bool {
        self.max_violation <= PASS_TOL
    }
}

/// Reduced costs are recomputed from `s.duals`, so a tampered dual shows up
/// even on rows with zero slack.
pub fn check_complementary_slackness(p: &LpProblem, s: &LpSolution) -> Result<SlacknessReport> {
    if s.status != LpStatus::Optimal {
        return Err(Error::State(
            "complementary slackness needs an optimal solution".into(),
        ));
    }
    // Work in minimization form.
    let sign = if p.sense == Sense::Minimize {
        1.0
    } else {
        -1.0
    };
    let mut conditions = Vec::new();
    let mut d: Vec<f64> = p.cost.iter().map(|c| sign * c).collect();
    for (r, row) in p.rows.iter().enumerate() {
        let y = sign * s.duals[r];
        for &(j, a) in &row.coeffs {
            d[j] -= a * y;
        }
        let act = p.row_activity(r, &s.x);
        let (slack, wrong_sign) = match row.relation {
            Relation::Le => (row.rhs - act, y.max(0.0)),
            Relation::Ge => (act - row.rhs, (-y).max(0.0)),
            Relation::Eq => (0.0, 0.0),
        };
        conditions.push(Condition::Row {
            row: r,
            violation: (y * slack).abs().max(wrong_sign),
        });
    }
    for (j, &dj) in d.iter().enumerate() {
        let (l, u, x) = (p.lower[j], p.upper[j], s.x[j]);
        let violation = if dj > 0.0 {
            if l.is_finite() {
                dj * (x - l).abs()
            } else {
                dj
            }
        } else if dj < 0.0 {
            if u.is_finite() {
                -dj * (u - x).abs()
            } else {
                -dj
            }
        } else {
            0.0
        };
        conditions.push(Condition::Column { var: j, violation });
    }
    let max_violation = conditions
        .iter()
        .map(Condition::violation)
        .fold(0.0, f64::max);
    Ok(SlacknessReport {
        max_violation,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;

    fn dispatch_lp() -> LpProblem {
        let mut p = LpProblem::new(Sense::Minimize);
        let a = p.add_var(2.0, 0.0, 7.0);
        let b = p.add_var(3.0, 0.0, 16.0);
        p.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 10.0);
        p
    }

    #[test]
    fn optimal_solution_passes() {
        let p = dispatch_lp();
        let s = solve_lp(&p).unwrap();
        let rep = check_complementary_slackness(&p, &s).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn perturbed_dual_fails() {
        let p = dispatch_lp();
        let mut s = solve_lp(&p).unwrap();
        s.duals[0] += 0.1;
        let rep = check_complementary_slackness(&p, &s).unwrap();
        assert!(!rep.pass());
    }

    #[test]
    fn empty_lp_passes_with_zero() {
        let p = LpProblem::new(Sense::Minimize);
        let s = solve_lp(&p).unwrap();
        let rep = check_complementary_slackness(&p, &s).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.max_violation, 0.0);
    }

    #[test]
    fn non_optimal_is_a_state_error() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(0.0, 0.0, 1.0);
        p.add_row(vec![(x, 1.0)], Relation::Ge, 2.0);
        let s = solve_lp(&p).unwrap();
        assert!(matches!(
            check_complementary_slackness(&p, &s),
            Err(Error::State(_))
        ));
    }
}
