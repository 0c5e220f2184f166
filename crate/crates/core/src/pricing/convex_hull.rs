//! Convex hull prices: the maximizer of the Lagrangian dual of the energy
//! balance, computed over enumerated commitment schedules.

use crate::error::{Error, Result};
use crate::instance::{GeneratorSpec, UCInstance};
use crate::lp::{lexicographic_min, solve_lp, LpProblem, LpStatus, Relation, Sense};
use crate::robust::solve_aro;

use super::{PaymentRow, PaymentTable};

pub const MAX_PERIODS: usize = 8;
pub const MAX_GENERATORS: usize = 6;
const CUT_TOL: f64 = 1e-7;
const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHullResult {
    pub prices: Vec<f64>,
    /// Lagrangian dual value at `prices`.
    pub dual_objective: f64,
    pub uc_objective: f64,
    /// `uc_objective − dual_objective`.
    pub gap: f64,
    /// Profit forgone by following the UC schedule at `prices`.
    pub loc_uplift: Vec<f64>,
    /// Per-generator Lagrangian term `min (cost − π·p)`: the amount that
    /// reconciles price revenue with the as-bid cost of the best response.
    pub reconciliation: Vec<f64>,
    /// `π·p*` for the UC dispatch.
    pub revenue: Vec<f64>,
    /// As-bid cost of the UC schedule.
    pub as_bid: Vec<f64>,
    pub generators: Vec<String>,
}

impl ConvexHullResult {
    /// Revenue in the energy column, the reconciliation term in the
    /// commitment column and the lost-opportunity uplift; rows total the
    /// as-bid cost.
    pub fn payment_table(&self) -> PaymentTable {
        let rows = (0..self.generators.len())
            .map(|i| {
                PaymentRow::new(
                    &self.generators[i],
                    self.reconciliation[i],
                    self.revenue[i],
                    0.0,
                    self.loc_uplift[i],
                )
            })
            .collect();
        PaymentTable::new("chull", rows)
    }
}

/// Dispatch polytope and commitment cost of one on/off sequence.
#[derive(Debug, Clone)]
struct Schedule {
    fixed_cost: f64,
    dispatch: LpProblem,
}

fn runs_ok(g: &GeneratorSpec, on: &[bool]) -> bool {
    let mut prev = g.initial_on;
    let t_end = on.len();
    let mut t = 0;
    while t < t_end {
        let state = on[t];
        let start = t;
        while t < t_end && on[t] == state {
            t += 1;
        }
        let len = t - start;
        // runs continuing the initial state and runs cut by the horizon are exempt
        let continues_initial = start == 0 && state == prev;
        let min = if state { g.min_up } else { g.min_down } as usize;
        if !continues_initial && t < t_end && len < min {
            return false;
        }
        prev = state;
    }
    true
}

fn dispatch_lp(g: &GeneratorSpec, on: &[bool]) -> LpProblem {
    let tt = on.len();
    let mut lp = LpProblem::new(Sense::Minimize);
    let p: Vec<usize> = on
        .iter()
        .map(|&s| {
            let s = if s { 1.0 } else { 0.0 };
            lp.add_var(g.energy_cost, g.cap_min * s, g.cap_max * s)
        })
        .collect();
    if tt > 1 && g.has_ramp_limits() {
        let ramp = g.ramp_rate.unwrap_or(g.cap_max);
        let up = g.startup_rate.unwrap_or(g.cap_max);
        let down = g.shutdown_rate.unwrap_or(g.cap_max);
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        let mut prev = g.initial_on;
        for t in 0..tt {
            let ru = b(on[t] && !prev);
            let rd = b(!on[t] && prev);
            if t == 0 {
                if !g.initial_on {
                    lp.add_row(vec![(p[0], 1.0)], Relation::Le, up * ru);
                }
            } else {
                lp.add_row(
                    vec![(p[t], 1.0), (p[t - 1], -1.0)],
                    Relation::Le,
                    ramp * b(on[t - 1]) + up * ru,
                );
                lp.add_row(
                    vec![(p[t - 1], 1.0), (p[t], -1.0)],
                    Relation::Le,
                    ramp * b(on[t]) + down * rd,
                );
            }
            prev = on[t];
        }
    }
    lp
}

fn schedules(g: &GeneratorSpec, tt: usize) -> Vec<Schedule> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << tt) {
        let on: Vec<bool> = (0..tt).map(|t| mask >> t & 1 == 1).collect();
        if !runs_ok(g, &on) {
            continue;
        }
        let mut prev = g.initial_on;
        let mut fixed_cost = 0.0;
        for &s in &on {
            if s {
                fixed_cost += g.fixed_cost_per_period();
                if !prev {
                    fixed_cost += g.startup_cost;
                }
            }
            prev = s;
        }
        out.push(Schedule {
            dispatch: dispatch_lp(g, &on),
            fixed_cost,
        });
    }
    out
}

/// Best response of one generator at prices `pi`: `(value, dispatch)` with
/// value `min (cost − π·p)`.
fn best_response(scheds: &[Schedule], pi: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in scheds {
        let mut lp = s.dispatch.clone();
        for (c, p) in lp.cost.iter_mut().zip(pi) {
            *c -= p;
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let v = s.fixed_cost + sol.objective;
        if best.as_ref().is_none_or(|(b, _)| v < *b - 1e-12) {
            best = Some((v, sol.x));
        }
    }
    best.ok_or_else(|| Error::Infeasible("a generator has no feasible schedule".into()))
}

fn check_scale(inst: &UCInstance) -> Result<()> {
    let (tt, n) = (inst.periods, inst.n_gens());
    if tt > MAX_PERIODS || n > MAX_GENERATORS {
        return Err(Error::Enumeration {
            count: n.saturating_mul(1usize.checked_shl(tt as u32).unwrap_or(usize::MAX)),
            limit: MAX_GENERATORS << MAX_PERIODS,
        });
    }
    Ok(())
}

/// Lagrangian dual function at `pi`: the total and each generator's term.
pub fn lagrangian_value(inst: &UCInstance, pi: &[f64]) -> Result<(f64, Vec<f64>)> {
    inst.validate()?;
    check_scale(inst)?;
    if pi.len() != inst.periods {
        return Err(Error::Dimension(format!(
            "{} prices for {} periods",
            pi.len(),
            inst.periods
        )));
    }
    let mut terms = Vec::with_capacity(inst.n_gens());
    for g in &inst.generators {
        terms.push(best_response(&schedules(g, inst.periods), pi)?.0);
    }
    let load: f64 = (0..inst.periods).map(|t| pi[t] * inst.total_load(t)).sum();
    Ok((load + terms.iter().sum::<f64>(), terms))
}

/// Maximizes the Lagrangian dual with Kelley cuts; the reported prices are
/// the lexicographically smallest optimal vector.
pub fn convex_hull_prices(inst: &UCInstance) -> Result<ConvexHullResult> {
    inst.validate()?;
    check_scale(inst)?;
    let (n, tt) = (inst.n_gens(), inst.periods);
    let det = inst.deterministic();
    let (sol, _) = solve_aro(&det)?;
    let all: Vec<Vec<Schedule>> = inst.generators.iter().map(|g| schedules(g, tt)).collect();

    let bound = 100.0
        * inst
            .generators
            .iter()
            .map(|g| g.energy_cost.abs() + g.fixed_cost_per_period().abs() + g.startup_cost.abs())
            .fold(1.0, f64::max);
    let mut master = LpProblem::new(Sense::Maximize);
    let pi: Vec<usize> = (0..tt)
        .map(|t| master.add_var(inst.total_load(t), -bound, bound))
        .collect();
    let z: Vec<usize> = (0..n)
        .map(|_| master.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    // z_i ≤ fixed + Σ C p_t − Σ π_t p_t
    let add_cut = |master: &mut LpProblem, i: usize, value: f64, p: &[f64], at: &[f64]| {
        let mut coeffs: Vec<(usize, f64)> = vec![(z[i], 1.0)];
        coeffs.extend((0..tt).map(|t| (pi[t], p[t])));
        let constant = value + (0..tt).map(|t| at[t] * p[t]).sum::<f64>();
        master.add_row(coeffs, Relation::Le, constant);
    };
    let zero = vec![0.0; tt];
    for (i, s) in all.iter().enumerate() {
        let (v, p) = best_response(s, &zero)?;
        add_cut(&mut master, i, v, &p, &zero);
    }

    let mut rounds = 0;
    let (prices, dual_objective, terms) = loop {
        // converge the outer model
        loop {
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(Error::Convergence { rounds });
            }
            let s = solve_lp(&master)?;
            if s.status != LpStatus::Optimal {
                return Err(Error::Consistency(format!(
                    "price master is {:?}",
                    s.status
                )));
            }
            let at: Vec<f64> = pi.iter().map(|&k| s.x[k]).collect();
            if !refine(&mut master, &all, &at, &z, &s.x, &add_cut)? {
                break;
            }
        }
        let (x, level) = lexicographic_min(&master, &pi, 1e-9)?
            .ok_or_else(|| Error::Consistency("price face selection failed".into()))?;
        let at: Vec<f64> = pi.iter().map(|&k| x[k]).collect();
        let (value, terms) = lagrangian_value(inst, &at)?;
        if value >= level - CUT_TOL * (1.0 + level.abs()) {
            break (at, value, terms);
        }
        refine(&mut master, &all, &at, &z, &x, &add_cut)?;
    };
    if prices.iter().any(|p| p.abs() >= bound * (1.0 - 1e-9)) {
        return Err(Error::Consistency(
            "convex hull prices reached the search box".into(),
        ));
    }

    let mut loc_uplift = Vec::with_capacity(n);
    let mut revenue = Vec::with_capacity(n);
    let mut as_bid = Vec::with_capacity(n);
    let table = super::pay_as_bid_day_ahead(&sol, &det);
    for ((u, row), term) in sol.policy.u.iter().zip(&table.rows).zip(&terms) {
        let rev: f64 = (0..tt).map(|t| prices[t] * u[t]).sum();
        let cost = row.total;
        loc_uplift.push((-term - (rev - cost)).max(0.0));
        revenue.push(rev);
        as_bid.push(cost);
    }
    Ok(ConvexHullResult {
        gap: sol.objective - dual_objective,
        uc_objective: sol.objective,
        prices,
        dual_objective,
        loc_uplift,
        reconciliation: terms,
        revenue,
        as_bid,
        generators: inst.generators.iter().map(|g| g.id.clone()).collect(),
    })
}

/// Adds a cut for every generator whose best response at `at` undercuts its
/// master estimate; reports whether any was added.
fn refine(
    master: &mut LpProblem,
    all: &[Vec<Schedule>],
    at: &[f64],
    z: &[usize],
    x: &[f64],
    add_cut: &impl Fn(&mut LpProblem, usize, f64, &[f64], &[f64]),
) -> Result<bool> {
    let mut added = false;
    for (i, s) in all.iter().enumerate() {
        let (v, p) = best_response(s, at)?;
        if v < x[z[i]] - CUT_TOL * (1.0 + v.abs()) {
            add_cut(master, i, v, &p, at);
            added = true;
        }
    }
    Ok(added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;

    #[test]
    fn chen_convex_hull() {
        let inst = builtin_instance("chen-multiperiod").unwrap();
        let r = convex_hull_prices(&inst).unwrap();
        for (a, b) in r.prices.iter().zip([10.0, 10.0, 276.0]) {
            assert!((a - b).abs() < 1e-3, "{:?}", r.prices);
        }
        assert!((r.dual_objective - 6975.0).abs() < 1e-3);
        assert!((r.gap - 365.0).abs() < 1e-3);
        assert!((r.loc_uplift[1] - 365.0).abs() < 1e-3 && r.loc_uplift[0].abs() < 1e-3);
        let t = r.payment_table();
        assert!((t.rows[1].commitment + t.rows[1].energy - 4475.0).abs() < 1e-3);
        assert!((t.grand_total - 7340.0).abs() < 1e-3);
    }

    #[test]
    fn run_rules() {
        let mut g = GeneratorSpec::simple("G", 0.0, 1.0, 10.0);
        g.min_up = 2;
        assert!(!runs_ok(&g, &[false, true, false]));
        assert!(runs_ok(&g, &[false, true, true]));
        assert!(runs_ok(&g, &[false, false, true]));
        g.initial_on = true;
        assert!(runs_ok(&g, &[true, false, false]));
    }

    #[test]
    fn scale_limit() {
        let mut inst = builtin_instance("scarf").unwrap();
        assert!(matches!(
            convex_hull_prices(&inst),
            Err(Error::Enumeration { .. })
        ));
        inst.generators.truncate(6);
        assert!(check_scale(&inst).is_ok());
    }
}
