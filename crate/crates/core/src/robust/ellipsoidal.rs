//! Ellipsoidal (L2) sets by supporting-hyperplane outer approximation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::UCInstance;
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::mip::{solve_milp, MipStatus};
use crate::norms::{norm, NormOrder};

use super::model::build_uc_model;
use super::program::{Linearized, Multipliers, RobustProgram};
use super::solve::{assemble_certificate, assemble_solution, AroSolution, DualCertificate};

/// Commitment rounds (one MILP each).
pub const MAX_ROUNDS: usize = 200;
/// Continuous refinement LPs over all rounds.
pub const MAX_LP_ROUNDS: usize = 20_000;
/// Relative objective slack of the face used for proximal points.
const FACE_SLACK: f64 = 1e-9;

/// A cut `g·s_{r,k}(y) ≤ e_{r,k}` with `‖g‖_2 = 1`.
#[derive(Debug, Clone)]
struct Cut {
    row: usize,
    term: usize,
    g: Vec<f64>,
}

fn cut_row(p: &RobustProgram, lin: &Linearized, c: &Cut) -> Option<(Vec<(usize, f64)>, f64)> {
    let e = lin.epigraph[c.row][c.term].as_ref()?[0];
    let t = &p.rows[c.row].terms[c.term];
    let mut coeffs = vec![(e, -1.0)];
    let mut constant = 0.0;
    for (gj, comp) in c.g.iter().zip(&t.comps) {
        if *gj == 0.0 {
            continue;
        }
        constant += gj * comp.constant;
        coeffs.extend(comp.coeffs.iter().map(|&(v, a)| (v, gj * a)));
    }
    Some((coeffs, -constant))
}

fn with_cuts(p: &RobustProgram, lin: &Linearized, cuts: &[Cut]) -> (LpProblem, Vec<usize>) {
    let mut lp = lin.mip.lp.clone();
    let rows = cuts
        .iter()
        .map(|c| {
            let (coeffs, rhs) = cut_row(p, lin, c).expect("cut on an active term");
            lp.add_row(coeffs, Relation::Le, rhs)
        })
        .collect();
    (lp, rows)
}

/// Largest violation of a robust row under exact L2 norms, and cuts on the
/// terms of every row violated by more than `tol`.
fn separate(p: &RobustProgram, lin: &Linearized, x: &[f64], tol: f64) -> (f64, Vec<Cut>) {
    let mut worst: f64 = 0.0;
    let mut cuts = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (r, row) in p.rows.iter().enumerate() {
        if row.skip || !row.terms.iter().any(|t| t.active()) {
            continue;
        }
        let viol = p.row_lhs(r, x) - row.rhs;
        worst = worst.max(viol);
        if viol <= tol {
            continue;
        }
        for (k, t) in row.terms.iter().enumerate() {
            let Some(e) = lin.epigraph[r][k].as_ref().map(|v| v[0]) else {
                continue;
            };
            let s = t.eval(x);
            let len = norm(&s, NormOrder::Two);
            if len > x[e] && len > 0.0 && seen.insert(e) {
                cuts.push(Cut {
                    row: r,
                    term: k,
                    g: s.iter().map(|v| v / len).collect(),
                });
            }
        }
    }
    (worst, cuts)
}

fn initial_cuts(p: &RobustProgram, lin: &Linearized) -> Vec<Cut> {
    let mut seen = std::collections::BTreeSet::new();
    let mut cuts = Vec::new();
    for (r, row) in p.rows.iter().enumerate() {
        for (k, t) in row.terms.iter().enumerate() {
            let Some(e) = lin.epigraph[r][k].as_ref().map(|v| v[0]) else {
                continue;
            };
            if !seen.insert(e) {
                continue;
            }
            for j in 0..t.comps.len() {
                for sign in [1.0, -1.0] {
                    let mut g = vec![0.0; t.comps.len()];
                    g[j] = sign;
                    cuts.push(Cut { row: r, term: k, g });
                }
            }
        }
    }
    cuts
}

/// Solves the L2 counterpart to within `tol` of every norm term. The
/// certificate is read from the final LP and flagged approximate.
pub fn ellipsoidal_outer_solve(
    inst: &UCInstance,
    tol: f64,
) -> Result<(AroSolution, DualCertificate)> {
    if inst.norm_order() != NormOrder::Two {
        return Err(Error::validation(
            "norm = L2",
            "outer approximation is for ellipsoidal sets; use solve_aro",
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::validation("tol > 0", format!("got {tol}")));
    }
    let model = build_uc_model(inst)?;
    let full = &model.program;
    let lin_full = full.linearize();
    let mut cuts = initial_cuts(full, &lin_full);
    let nv = full.vars.len();

    let mut lp_rounds = 0usize;
    for _ in 0..MAX_ROUNDS {
        let (lp, _) = with_cuts(full, &lin_full, &cuts);
        let mip = crate::mip::MipProblem {
            lp,
            binaries: lin_full.mip.binaries.clone(),
        };
        let s = solve_milp(&mip)?;
        match s.status {
            MipStatus::Optimal => {}
            MipStatus::Infeasible => {
                return Err(Error::Infeasible(
                    "no commitment covers the load over the ellipsoidal set".into(),
                ))
            }
            MipStatus::Unbounded => return Err(Error::Unbounded("outer approximation".into())),
        }
        let lower = s.objective;
        let on: Vec<Vec<f64>> = model
            .layout
            .on
            .iter()
            .map(|row| row.iter().map(|&k| s.x[k].round()).collect())
            .collect();
        let ybin = model.binary_point(inst, &on)?;
        let fixed = full.fix_binaries(&ybin);
        let lin_fixed = fixed.linearize();
        // refine the continuous part at this commitment; `None` when the
        // cuts show the commitment cannot cover the set
        let mut center: Option<Vec<f64>> = None;
        let refined = loop {
            lp_rounds += 1;
            if lp_rounds > MAX_LP_ROUNDS {
                return Err(Error::Convergence { rounds: lp_rounds });
            }
            let (lp, cut_rows) = with_cuts(&fixed, &lin_fixed, &cuts);
            let ls = solve_lp(&lp)?;
            match ls.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => break None,
                LpStatus::Unbounded => return Err(Error::Unbounded("outer approximation".into())),
            }
            let (viol, fresh) = separate(&fixed, &lin_fixed, &ls.x, tol);
            cuts.extend(fresh);
            if viol <= tol {
                break Some((ls.x.clone(), ls, cut_rows));
            }
            // the optimal face is usually large; move to its point nearest
            // the previous one and separate there too
            let c = center.take().unwrap_or_else(|| ls.x.clone());
            let x = nearest_on_face(&lp, &ls, &c, nv)?;
            let (viol, fresh) = separate(&fixed, &lin_fixed, &x, tol);
            if viol <= tol {
                break Some((x, ls, cut_rows));
            }
            cuts.extend(fresh);
            center = Some(x);
        };
        let Some((x, ls, cut_rows)) = refined else {
            continue;
        };
        if ls.objective > lower + tol * (1.0 + lower.abs()) {
            // another commitment may now be cheaper
            continue;
        }
        let mult = certificate_multipliers(&fixed, &lin_fixed, &cuts, &cut_rows, &ls.duals);
        let mut y = x[..nv].to_vec();
        let eta = model.layout.eta;
        y[eta] = 0.0;
        y[eta] = fixed.row_lhs(model.layout.cost_row, &y);
        let objective = ls.objective;
        let sol = assemble_solution(model, fixed, y);
        let cert = assemble_certificate(inst, &sol, mult, objective, true);
        return Ok((sol, cert));
    }
    Err(Error::Convergence { rounds: MAX_ROUNDS })
}

/// A point of the LP's optimal face minimizing the l1 distance to `center`
/// over the first `n` variables. Any such point pairs with the LP duals.
fn nearest_on_face(
    lp: &LpProblem,
    opt: &crate::lp::LpSolution,
    center: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    let mut face = lp.clone();
    face.cost.iter_mut().for_each(|c| *c = 0.0);
    let sign = if lp.sense == Sense::Minimize {
        1.0
    } else {
        -1.0
    };
    let obj: Vec<(usize, f64)> = lp
        .cost
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, sign * c))
        .collect();
    let z = sign * opt.objective;
    face.add_row(obj, Relation::Le, z + FACE_SLACK * (1.0 + z.abs()));
    face.sense = Sense::Minimize;
    for (j, &c) in center.iter().enumerate().take(n) {
        let dp = face.add_var(1.0, 0.0, f64::INFINITY);
        let dn = face.add_var(1.0, 0.0, f64::INFINITY);
        face.add_row(vec![(j, 1.0), (dp, -1.0), (dn, 1.0)], Relation::Eq, c);
    }
    let s = solve_lp(&face)?;
    if s.status != LpStatus::Optimal {
        return Ok(opt.x.clone());
    }
    Ok(s.x[..lp.n_vars()].to_vec())
}

/// Row multipliers are the negated LP duals; each term's multiplier vector is
/// the dual-weighted sum of its cut normals, shared in proportion to
/// `β λ_r` when terms of several rows use one epigraph.
fn certificate_multipliers(
    p: &RobustProgram,
    lin: &Linearized,
    cuts: &[Cut],
    cut_rows: &[usize],
    duals: &[f64],
) -> Multipliers {
    let lambda: Vec<f64> = lin
        .row
        .iter()
        .map(|r| r.map_or(0.0, |k| -duals[k]))
        .collect();
    let mut pooled: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (c, &row) in cuts.iter().zip(cut_rows) {
        let Some(e) = lin.epigraph[c.row][c.term].as_ref().map(|v| v[0]) else {
            continue;
        };
        let pi = -duals[row];
        let acc = pooled.entry(e).or_insert_with(|| vec![0.0; c.g.len()]);
        for (a, g) in acc.iter_mut().zip(&c.g) {
            *a += pi * g;
        }
    }
    let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
    for (r, row) in p.rows.iter().enumerate() {
        for (k, t) in row.terms.iter().enumerate() {
            if let Some(e) = lin.epigraph[r][k].as_ref().map(|v| v[0]) {
                *weight.entry(e).or_default() += t.budget * lambda[r];
            }
        }
    }
    let w = p
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.terms
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let Some(e) = lin.epigraph[r][k].as_ref().map(|v| v[0]) else {
                        return Vec::new();
                    };
                    let total = weight[&e];
                    let share = if total > 0.0 {
                        t.budget * lambda[r] / total
                    } else {
                        0.0
                    };
                    pooled
                        .get(&e)
                        .map(|v| v.iter().map(|a| a * share).collect())
                        .unwrap_or_else(|| vec![0.0; t.comps.len()])
                })
                .collect()
        })
        .collect();
    Multipliers { lambda, w }
}
