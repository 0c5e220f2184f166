//! Next-day dispatch against realized residual load, and the self-schedule
//! audit of the day-ahead prices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fixed6;
use crate::instance::UCInstance;
use crate::lp::{dual_price_range, solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::mip::{solve_milp, MipStatus};
use crate::pricing::THEOREM_TOL;
use crate::robust::program::{Owner, RobustProgram, RowKind};
use crate::robust::{AroSolution, DualCertificate};

/// Headroom below this size is roundoff, not a forced reduction.
const HEAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IntradayResult {
    pub total_residual: f64,
    /// Incremental dispatch per generator.
    pub dispatch: Vec<f64>,
    pub cost: f64,
    /// `Σ_i C_i Σ_j V_ij d_j`.
    pub bound: f64,
    /// Balance dual; the smallest optimal one at a breakpoint.
    pub price: f64,
}

/// Dispatch of period 0.
pub fn intraday_dispatch(
    inst: &UCInstance,
    sol: &AroSolution,
    d: &[f64],
) -> Result<IntradayResult> {
    intraday_dispatch_period(inst, sol, 0, d)
}

/// `min Σ C_i p_i` s.t. `Σ p_i = Σ d_j`, `0 ≤ p_i ≤ pmax_i x_i − u_i` in period `t`.
pub fn intraday_dispatch_period(
    inst: &UCInstance,
    sol: &AroSolution,
    t: usize,
    d: &[f64],
) -> Result<IntradayResult> {
    intraday_dispatch_realized(inst, sol, t, d, &vec![0.0; inst.generators.len()])
}

/// Dispatch of period `t` when capacities also deviate by `r`, unit `i`
/// offering `pmax_i + r_i`. A unit whose capacity falls below its day-ahead
/// output is forced down, and the bound gains `Σ_i C_i Σ_k Z_ik r_k`.
pub fn intraday_dispatch_realized(
    inst: &UCInstance,
    sol: &AroSolution,
    t: usize,
    d: &[f64],
    r: &[f64],
) -> Result<IntradayResult> {
    if t >= inst.periods {
        return Err(Error::Dimension(format!("period {t} of {}", inst.periods)));
    }
    if d.len() != inst.n_nodes() || r.len() != inst.generators.len() {
        return Err(Error::Dimension(format!(
            "{} load and {} capacity residuals for {} nodes and {} generators",
            d.len(),
            r.len(),
            inst.n_nodes(),
            inst.generators.len()
        )));
    }
    if d.iter().any(|v| !v.is_finite() || *v < 0.0) || r.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(
            "residual load >= 0",
            "load residuals must be finite and nonnegative, capacity residuals finite",
        ));
    }
    let total: f64 = d.iter().sum();
    let mut lp = LpProblem::new(Sense::Minimize);
    let p: Vec<usize> = inst
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let head = (g.cap_max + r[i]) * sol.commitments.on[i][t] - sol.policy.u[i][t];
            if head < -HEAD_TOL {
                lp.add_var(g.energy_cost, -sol.policy.u[i][t], head)
            } else {
                lp.add_var(g.energy_cost, 0.0, head.max(0.0))
            }
        })
        .collect();
    lp.add_row(p.iter().map(|&k| (k, 1.0)).collect(), Relation::Eq, total);
    let s = solve_lp(&lp)?;
    if s.status != LpStatus::Optimal {
        return Err(Error::Infeasible(format!(
            "residual load {total} exceeds the committed headroom"
        )));
    }
    let (lo, hi) = dual_price_range(&lp, 0)?.unwrap_or((None, None));
    let price = lo.or(hi).unwrap_or(s.duals[0]);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let bound = inst
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| g.energy_cost * (dot(&sol.policy.v[t][i], d) + dot(&sol.policy.z[t][i], r)))
        .sum();
    Ok(IntradayResult {
        total_residual: total,
        dispatch: s.x,
        cost: s.objective,
        bound,
        price,
    })
}

/// Evaluates `grid` equally spaced residual totals on `[0, Γ_0]`, placed on
/// the first node.
pub fn realization_sweep(
    inst: &UCInstance,
    sol: &AroSolution,
    grid: usize,
) -> Result<Vec<IntradayResult>> {
    if grid < 2 {
        return Err(Error::validation("grid >= 2", format!("got {grid}")));
    }
    let top = inst.gamma(0);
    (0..grid)
        .map(|k| {
            let mut d = vec![0.0; inst.n_nodes()];
            d[0] = top * k as f64 / (grid - 1) as f64;
            intraday_dispatch(inst, sol, &d)
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "total_residual_mw,lp_cost,adaptive_bound,marginal_price";

pub fn sweep_csv(points: &[IntradayResult]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for p in points {
        let nums = [p.total_residual, p.cost, p.bound, p.price].map(fixed6);
        let _ = writeln!(out, "{}", nums.join(","));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfitReport {
    pub generator: String,
    /// Profit of the market schedule at the market prices.
    pub centralized: f64,
    /// Best profit over the generator's own feasible schedules.
    pub decentralized: f64,
    pub incentive: bool,
}

/// Self-schedule audit of generator `id`; fails with a consistency error
/// when the centralized profit is not zero or self-scheduling pays.
pub fn decentralized_profit(
    inst: &UCInstance,
    cert: &DualCertificate,
    sol: &AroSolution,
    id: &str,
) -> Result<ProfitReport> {
    let r = self_schedule_profit(inst, cert, sol, id)?;
    if r.centralized.abs() > THEOREM_TOL {
        return Err(Error::Consistency(format!(
            "{id}: centralized profit {} is not zero",
            r.centralized
        )));
    }
    if r.incentive {
        return Err(Error::Consistency(format!(
            "{id}: self-schedule profit {} beats the market schedule",
            r.decentralized
        )));
    }
    Ok(r)
}

/// The same audit without the equilibrium assertions, for arbitrary prices.
///
/// The generator is paid the certificate's prices for its decisions: the
/// balance price on dispatch, the balance-row multipliers on its policy
/// coefficients and the fixing duals on its binaries. It is charged its
/// bids, with the worst case taken as the certificate's cost-row
/// multipliers. It is bound by its own robust rows and commitment logic.
pub fn self_schedule_profit(
    inst: &UCInstance,
    cert: &DualCertificate,
    sol: &AroSolution,
    id: &str,
) -> Result<ProfitReport> {
    let i = inst
        .generator_index(id)
        .ok_or_else(|| Error::validation("known generator", format!("no generator `{id}`")))?;
    let full = &sol.model.program;
    let fixed = &sol.phase2;
    let m = &cert.multipliers;
    let owner = Owner::Generator(i);

    // minimization-form price-adjusted cost of every program variable
    let mut cost: Vec<f64> = full.vars.iter().map(|v| v.cost).collect();
    for (r, row) in fixed.rows.iter().enumerate() {
        if row.skip {
            continue;
        }
        match (row.owner, row.kind) {
            (Owner::Market, _) => {
                for &(v, a) in &row.lin {
                    cost[v] += m.lambda[r] * a;
                }
                for (k, t) in row.terms.iter().enumerate() {
                    let Some(w) = m.w[r].get(k).filter(|w| !w.is_empty()) else {
                        continue;
                    };
                    for (wj, c) in w.iter().zip(&t.comps) {
                        for &(v, a) in &c.coeffs {
                            cost[v] += wj * a;
                        }
                    }
                }
            }
            (_, RowKind::Fix(v)) => cost[v] -= m.lambda[r],
            _ => {}
        }
    }

    let mine: Vec<usize> = (0..full.vars.len())
        .filter(|&v| full.vars[v].owner == owner)
        .collect();
    let mut local = vec![usize::MAX; full.vars.len()];
    let mut sub = RobustProgram::new(full.order);
    for &v in &mine {
        local[v] = sub.add_var(full.vars[v].kind, cost[v], owner);
    }
    let remap = |lin: &[(usize, f64)]| -> Vec<(usize, f64)> {
        lin.iter().map(|&(v, a)| (local[v], a)).collect()
    };
    for row in full.rows.iter().filter(|r| r.owner == owner) {
        let mut r = row.clone();
        r.lin = remap(&row.lin);
        for t in r.terms.iter_mut() {
            for c in t.comps.iter_mut() {
                c.coeffs = remap(&c.coeffs);
            }
        }
        sub.add_row(r);
    }
    let lin = sub.linearize();
    let s = solve_milp(&lin.mip)?;
    if s.status != MipStatus::Optimal {
        return Err(Error::Consistency(format!(
            "{id}: self-schedule problem is {:?}",
            s.status
        )));
    }
    let decentralized = -s.objective;
    let centralized = -mine.iter().map(|&v| cost[v] * sol.y[v]).sum::<f64>();
    Ok(ProfitReport {
        generator: id.to_string(),
        centralized,
        decentralized,
        incentive: decentralized - centralized > THEOREM_TOL,
    })
}

/// A copy of `cert` with every balance price raised by `delta`.
pub fn shift_balance_price(
    cert: &DualCertificate,
    sol: &AroSolution,
    delta: f64,
) -> DualCertificate {
    let mut out = cert.clone();
    for (t, &r) in sol.model.layout.demand_row.iter().enumerate() {
        out.multipliers.lambda[r] += delta;
        out.mu[t] += delta;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;
    use crate::robust::solve_aro;

    #[test]
    fn scarf_intraday_points() {
        let inst = builtin_instance("scarf").unwrap();
        let (sol, _) = solve_aro(&inst).unwrap();
        let mut d = vec![0.0; inst.n_nodes()];
        let r0 = intraday_dispatch(&inst, &sol, &d).unwrap();
        assert_eq!((r0.cost, r0.bound), (0.0, 0.0));
        d[0] = 10.0;
        let r = intraday_dispatch(&inst, &sol, &d).unwrap();
        assert!((r.cost - 20.0).abs() < 1e-6 && (r.price - 2.0).abs() < 1e-6);
        d[0] = 1e6;
        assert!(matches!(
            intraday_dispatch(&inst, &sol, &d),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn sweep_endpoints() {
        let inst = builtin_instance("scarf").unwrap();
        let (sol, _) = solve_aro(&inst).unwrap();
        let pts = realization_sweep(&inst, &sol, 2).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].total_residual, 20.0);
        assert!(realization_sweep(&inst, &sol, 1).is_err());
        assert!(sweep_csv(&pts).starts_with(SWEEP_CSV_HEADER));
    }

    #[test]
    fn audit_and_perturbation() {
        let inst = builtin_instance("scarf").unwrap();
        let (sol, cert) = solve_aro(&inst).unwrap();
        for g in &inst.generators {
            let r = decentralized_profit(&inst, &cert, &sol, &g.id).unwrap();
            assert!(!r.incentive);
        }
        let high = shift_balance_price(&cert, &sol, 1.0);
        let any = inst.generators.iter().any(|g| {
            self_schedule_profit(&inst, &high, &sol, &g.id)
                .unwrap()
                .decentralized
                > 1e-6
        });
        assert!(any);
    }
}
