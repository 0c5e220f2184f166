//! Explicit LP duals and optimal-face selection.

use super::{solve_lp_warm, Basis, LpProblem, LpSolution, LpStatus, Relation, Sense};
use crate::error::Result;

const INF: f64 = f64::INFINITY;

/// Where each primal row and bound multiplier lives in the dual LP.
#[derive(Debug, Clone)]
pub struct DualMap {
    /// Dual variable of each primal row; its value is the row's shadow price
    /// in the primal's own sense.
    pub row: Vec<usize>,
    pub lower: Vec<Option<usize>>,
    pub upper: Vec<Option<usize>>,
    /// The dual optimum equals `sign ×` the primal optimum.
    pub sign: f64,
}

/// Builds the dual of `p` as a maximization whose row variables equal the
/// primal shadow prices.
pub fn dual_problem(p: &LpProblem) -> (LpProblem, DualMap) {
    let s = if p.sense == Sense::Minimize {
        1.0
    } else {
        -1.0
    };
    let mut d = LpProblem::new(Sense::Maximize);
    let mut row = Vec::with_capacity(p.n_rows());
    for r in &p.rows {
        let (lo, hi) = match (r.relation, s > 0.0) {
            (Relation::Eq, _) => (-INF, INF),
            (Relation::Le, true) | (Relation::Ge, false) => (-INF, 0.0),
            (Relation::Ge, true) | (Relation::Le, false) => (0.0, INF),
        };
        row.push(d.add_var(s * r.rhs, lo, hi));
    }
    let n = p.n_vars();
    let mut lower = vec![None; n];
    let mut upper = vec![None; n];
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (ri, r) in p.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            cols[j].push((row[ri], s * a));
        }
    }
    for j in 0..n {
        let mut coeffs = std::mem::take(&mut cols[j]);
        if p.lower[j].is_finite() {
            let g = d.add_var(p.lower[j], 0.0, INF);
            lower[j] = Some(g);
            coeffs.push((g, 1.0));
        }
        if p.upper[j].is_finite() {
            let h = d.add_var(p.upper[j], -INF, 0.0);
            upper[j] = Some(h);
            coeffs.push((h, 1.0));
        }
        d.add_row(coeffs, Relation::Eq, s * p.cost[j]);
    }
    (
        d,
        DualMap {
            row,
            lower,
            upper,
            sign: s,
        },
    )
}

/// Complementary-slackness threshold for optimal faces.
const FACE_EPS: f64 = 1e-9;

/// The optimal face of `p` cut out by complementary slackness with its
/// first optimum's duals: rows whose dual exceeds `eps` in size become
/// equalities, and columns whose reduced cost does become fixed at their
/// bound. `None` when `p` has no optimum.
fn optimal_face(p: &LpProblem, eps: f64) -> Result<Option<(LpProblem, LpSolution, Basis)>> {
    let (first, basis) = solve_lp_warm(p, None)?;
    if first.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut q = p.clone();
    for (r, row) in q.rows.iter_mut().enumerate() {
        if first.duals[r].abs() > eps {
            row.relation = Relation::Eq;
        }
    }
    for j in 0..q.n_vars() {
        if first.reduced_costs[j].abs() > eps {
            let (l, u, x) = (q.lower[j], q.upper[j], first.x[j]);
            let at = if l.is_finite() && (!u.is_finite() || (x - l).abs() <= (u - x).abs()) {
                l
            } else {
                u
            };
            q.lower[j] = at;
            q.upper[j] = at;
        }
    }
    Ok(Some((q, first, basis)))
}

/// Among the optimal solutions of `p`, minimizes `keys[0]`, then `keys[1]`,
/// and so on, fixing each minimized key at its value. A key whose minimum
/// is unbounded is skipped. Returns the final point and its objective under
/// `p`.
pub fn lexicographic_min(
    p: &LpProblem,
    keys: &[usize],
    eps: f64,
) -> Result<Option<(Vec<f64>, f64)>> {
    let Some((mut q, first, basis)) = optimal_face(p, eps)? else {
        return Ok(None);
    };
    q.sense = Sense::Minimize;
    let mut x = first.x;
    let mut warm = Some(basis);
    for &k in keys {
        q.cost = vec![0.0; q.n_vars()];
        q.cost[k] = 1.0;
        let (s, b) = solve_lp_warm(&q, warm.as_ref())?;
        match s.status {
            LpStatus::Optimal => {
                let v = s.x[k];
                x = s.x;
                q.lower[k] = v;
                q.upper[k] = v;
                warm = Some(b);
            }
            LpStatus::Unbounded => {}
            LpStatus::Infeasible => break,
        }
    }
    let obj = p.objective_value(&x);
    Ok(Some((x, obj)))
}

/// Smallest and largest optimal shadow price of row `r` over the dual
/// optimal face. `None` marks an unbounded side; the whole result is `None`
/// when `p` has no optimum.
pub fn dual_price_range(p: &LpProblem, r: usize) -> Result<Option<(Option<f64>, Option<f64>)>> {
    let (d, map) = dual_problem(p);
    let Some((mut face, _, basis)) = optimal_face(&d, FACE_EPS)? else {
        return Ok(None);
    };
    let y = map.row[r];
    let mut ends = [None, None];
    for (slot, sense) in [(0, Sense::Minimize), (1, Sense::Maximize)] {
        face.sense = sense;
        face.cost = vec![0.0; face.n_vars()];
        face.cost[y] = 1.0;
        let s = solve_lp_warm(&face, Some(&basis))?.0;
        if s.status == LpStatus::Optimal {
            ends[slot] = Some(s.x[y]);
        }
    }
    Ok(Some((ends[0], ends[1])))
}
