//! The invariant suite behind `aro verify`: every structural law, theorem
//! and sampled property, run on one instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::instance::{load_instance, to_document, UCInstance};
use crate::intraday::{decentralized_profit, intraday_dispatch_realized, realization_sweep};
use crate::lp::{check_complementary_slackness, solve_lp, LpStatus, Relation};
use crate::mip::solve_milp;
use crate::norms::{dot, dual_order, max_linear_over_ball, norm, NormOrder};
use crate::pricing::convex_hull::{convex_hull_prices, MAX_GENERATORS, MAX_PERIODS};
use crate::pricing::{
    adaptive_uniform_day_ahead, deterministic_marginal, pay_as_bid_day_ahead,
    worst_case_settlement, PaymentTable, THEOREM_TOL,
};
use crate::robust::program::{RowKind, VarKind};
use crate::robust::{
    build_robust_primal, ellipsoidal_outer_solve, solve_aro, worst_case_realization, AroSolution,
    DualCertificate,
};

/// Policy samples for the feasibility check.
pub const FEASIBILITY_SAMPLES: usize = 1000;
/// Realizations for the intraday bound check.
pub const INTRADAY_SAMPLES: usize = 200;
/// Points per budget in the monotonicity check.
pub const MONOTONE_GRID: usize = 5;
/// Largest binary count checked against full enumeration.
pub const MAX_ENUMERATED_BINARIES: usize = 12;
/// Outer-approximation tolerance for ellipsoidal instances.
pub const ELLIPSOIDAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply to this instance.
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Robust solve by the method matching the instance's norm.
pub fn solve_any(inst: &UCInstance) -> Result<(AroSolution, DualCertificate)> {
    match inst.norm_order() {
        NormOrder::Two => ellipsoidal_outer_solve(inst, ELLIPSOIDAL_TOL),
        _ => solve_aro(inst),
    }
}

/// A point drawn uniformly from the `order` ball of `radius` in `n`
/// dimensions.
pub fn sample_ball<R: Rng>(rng: &mut R, n: usize, order: NormOrder, radius: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mut x: Vec<f64> = match order {
        NormOrder::Infinity => (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        NormOrder::One => {
            let e: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = e.iter().sum();
            e[..n]
                .iter()
                .map(|v| if rng.gen::<bool>() { v / s } else { -v / s })
                .collect()
        }
        NormOrder::Two => {
            let g: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let len = norm(&g, NormOrder::Two).max(f64::MIN_POSITIVE);
            let rad = rng.gen::<f64>().powf(1.0 / n as f64);
            g.iter().map(|v| v / len * rad).collect()
        }
    };
    x.iter_mut().for_each(|v| *v *= radius);
    x
}

struct Suite<'a> {
    inst: &'a UCInstance,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn record(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check {
            name,
            status,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &'static str, why: impl Into<String>) {
        self.checks.push(Check {
            name,
            status: Status::Skip,
            detail: why.into(),
        });
    }

    /// Runs `f`, recording an error as a failure.
    fn attempt(
        &mut self,
        name: &'static str,
        f: impl FnOnce(&UCInstance) -> Result<(bool, String)>,
    ) {
        match f(self.inst) {
            Ok((ok, detail)) => self.record(name, ok, detail),
            Err(e) => self.record(name, false, e.to_string()),
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Runs every check on `inst`. Errors only when the instance itself cannot
/// be solved; individual check failures are reported in the result.
pub fn verify_instance(inst: &UCInstance, seed: u64) -> Result<VerifyReport> {
    inst.validate()?;
    let (sol, cert) = solve_any(inst)?;
    let mut s = Suite {
        inst,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    s.attempt("instance-roundtrip", |inst| {
        let back = load_instance(&to_document(inst))?;
        Ok((
            &back == inst,
            "serialized document parses to an equal instance".into(),
        ))
    });
    norm_checks(&mut s, &mut rng);
    lp_checks(&mut s, &sol);
    match milp_vs_enumeration(inst, &sol) {
        Ok(Some((ok, detail))) => s.record("milp-enumeration", ok, detail),
        Ok(None) => s.skip("milp-enumeration", "too many binaries, or an L2 set"),
        Err(e) => s.record("milp-enumeration", false, e.to_string()),
    }
    structural_checks(&mut s, &sol, &cert);
    sampled_feasibility(&mut s, &sol, &mut rng);
    s.attempt("monotonicity", monotonicity);
    s.attempt("zero-budget-reduction", zero_budget_reduction);
    pricing_checks(&mut s, &sol, &cert);
    intraday_checks(&mut s, &sol, &cert, &mut rng);
    Ok(VerifyReport { checks: s.checks })
}

fn norm_checks(s: &mut Suite, rng: &mut ChaCha8Rng) {
    let n = s.inst.n_nodes().max(s.inst.n_gens());
    let mut worst: f64 = 0.0;
    let mut homogeneous = true;
    for _ in 0..100 {
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let radius = rng.gen_range(0.0..50.0);
        for order in [NormOrder::One, NormOrder::Two, NormOrder::Infinity] {
            let (value, arg) = max_linear_over_ball(&c, order, radius);
            worst = worst
                .max((dot(&c, &arg) - value).abs())
                .max(norm(&arg, order) - radius - 1e-9);
            let (twice, _) = max_linear_over_ball(&c, order, 2.0 * radius);
            homogeneous &= rel_close(twice, 2.0 * value, 1e-12);
        }
    }
    let involution = [NormOrder::One, NormOrder::Two, NormOrder::Infinity]
        .iter()
        .all(|&o| dual_order(dual_order(o)) == o);
    s.record(
        "norm-kit",
        worst <= 1e-9 && homogeneous && involution,
        format!("worst Hölder residual {worst:.3e}"),
    );
}

fn lp_checks(s: &mut Suite, sol: &AroSolution) {
    let lp = sol.phase2.linearize().mip.lp;
    let first = match solve_lp(&lp) {
        Ok(x) if x.status == LpStatus::Optimal => x,
        Ok(x) => return s.record("lp-duality", false, format!("phase-2 LP is {:?}", x.status)),
        Err(e) => return s.record("lp-duality", false, e.to_string()),
    };
    let dual_obj = first.dual_objective(&lp);
    s.record(
        "lp-duality",
        (first.objective - dual_obj).abs() <= 1e-6 * (1.0 + first.objective.abs()),
        format!("primal {:.6} dual {:.6}", first.objective, dual_obj),
    );
    match check_complementary_slackness(&lp, &first) {
        Ok(r) => s.record(
            "complementary-slackness",
            r.pass(),
            format!("max violation {:.3e}", r.max_violation),
        ),
        Err(e) => s.record("complementary-slackness", false, e.to_string()),
    }
    let mut scaled = lp.clone();
    scaled.cost.iter_mut().for_each(|c| *c *= 2.0);
    match solve_lp(&scaled) {
        Ok(t) if t.status == LpStatus::Optimal => {
            let obj_ok = rel_close(t.objective, 2.0 * first.objective, 1e-9);
            // the argmin set is unchanged: the scaled optimum is optimal for the original
            let argmin_ok = rel_close(lp.objective_value(&t.x), first.objective, 1e-9);
            let dual_ok = t.dual_objective(&scaled);
            s.record(
                "lp-scaling",
                obj_ok && argmin_ok && rel_close(dual_ok, 2.0 * dual_obj, 1e-6),
                format!("scaled objective {:.6}", t.objective),
            );
        }
        Ok(t) => s.record("lp-scaling", false, format!("scaled LP is {:?}", t.status)),
        Err(e) => s.record("lp-scaling", false, e.to_string()),
    }
}

/// Compares the MILP optimum with the best of all commitment patterns,
/// each priced by its continuous LP.
fn milp_vs_enumeration(inst: &UCInstance, sol: &AroSolution) -> Result<Option<(bool, String)>> {
    let model = &sol.model;
    let bits = inst.n_gens() * inst.periods;
    let binaries = model
        .program
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .count();
    if binaries > MAX_ENUMERATED_BINARIES || inst.norm_order() == NormOrder::Two {
        return Ok(None);
    }
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << bits) {
        let on: Vec<Vec<f64>> = (0..inst.n_gens())
            .map(|i| {
                (0..inst.periods)
                    .map(|t| ((mask >> (i * inst.periods + t)) & 1) as f64)
                    .collect()
            })
            .collect();
        // patterns that cannot carry the expected load are infeasible outright
        let short = (0..inst.periods).any(|t| {
            let cap: f64 = (0..inst.n_gens())
                .map(|i| on[i][t] * inst.generators[i].cap_max)
                .sum();
            cap < inst.total_load(t)
        });
        if short {
            continue;
        }
        let y = model.binary_point(inst, &on)?;
        let p = &model.program;
        let logic_ok = p
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == RowKind::Logic)
            .all(|(r, row)| {
                let lhs = p.row_lhs(r, &y);
                match row.relation {
                    Relation::Le => lhs <= row.rhs + 1e-9,
                    Relation::Ge => lhs >= row.rhs - 1e-9,
                    Relation::Eq => (lhs - row.rhs).abs() <= 1e-9,
                }
            });
        if !logic_ok {
            continue;
        }
        let lp = p.fix_binaries(&y).linearize().mip.lp;
        let r = solve_lp(&lp)?;
        if r.status == LpStatus::Optimal {
            best = best.min(r.objective);
        }
    }
    let milp = solve_milp(&build_robust_primal(inst)?)?.objective;
    Ok(Some((
        rel_close(milp, best, 1e-9) && rel_close(sol.objective, best, 1e-9),
        format!("milp {milp:.6} enumeration {best:.6}"),
    )))
}

fn structural_checks(s: &mut Suite, sol: &AroSolution, cert: &DualCertificate) {
    let inst = s.inst;
    let (n, m) = (inst.n_gens(), inst.n_nodes());
    let mut worst_col: f64 = 0.0;
    let mut worst_bal: f64 = 0.0;
    for t in 0..inst.periods {
        if inst.gamma(t) > 0.0 {
            for j in 0..m {
                let col: f64 = (0..n).map(|i| sol.policy.v[t][i][j]).sum();
                worst_col = worst_col.max((col - 1.0).abs());
            }
        }
        if inst.delta(t) > 0.0 {
            for k in 0..n {
                let col: f64 = (0..n).map(|i| sol.policy.z[t][i][k]).sum();
                worst_col = worst_col.max(col.abs());
            }
        }
        let u: f64 = (0..n).map(|i| sol.policy.u[i][t]).sum();
        worst_bal = worst_bal.max((u - inst.total_load(t)).abs());
    }
    s.record(
        "column-sums",
        worst_col <= 1e-6,
        format!("worst deviation {worst_col:.3e}"),
    );
    s.record(
        "load-balance",
        worst_bal <= 1e-6,
        format!("worst deviation {worst_bal:.3e}"),
    );
    s.record(
        "strong-duality",
        (sol.objective - cert.dual_objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()),
        format!(
            "primal {:.6} dual {:.6}",
            sol.objective, cert.dual_objective
        ),
    );
    let dv = sol.phase2.dual_violation(&cert.multipliers);
    s.record(
        "dual-feasibility",
        dv <= 1e-6,
        format!("worst violation {dv:.3e}"),
    );
    let iv = sol.phase2.identity_violation(&sol.y, &cert.multipliers);
    s.record(
        "optimality-identities",
        iv <= 1e-6,
        format!("worst residual {iv:.3e}"),
    );
}

fn sampled_feasibility(s: &mut Suite, sol: &AroSolution, rng: &mut ChaCha8Rng) {
    let inst = s.inst;
    let order = inst.norm_order();
    let mut worst: f64 = 0.0;
    for _ in 0..FEASIBILITY_SAMPLES {
        for t in 0..inst.periods {
            let d = sample_ball(rng, inst.n_nodes(), order, inst.gamma(t));
            let r = sample_ball(rng, inst.n_gens(), order, inst.delta(t));
            let mut total = 0.0;
            for (i, g) in inst.generators.iter().enumerate() {
                let p = sol.policy.dispatch(t, i, &d, &r);
                let cap = (g.cap_max + r[i]) * sol.commitments.on[i][t];
                worst = worst.max(-p).max(p - cap);
                total += p;
            }
            let load = inst.total_load(t) + d.iter().sum::<f64>();
            worst = worst.max(load - total);
        }
    }
    s.record(
        "sampled-feasibility",
        worst <= 1e-6,
        format!(
            "{FEASIBILITY_SAMPLES} samples, worst violation {:.3e}",
            worst.max(0.0)
        ),
    );
}

fn objective_at(inst: &UCInstance, gamma: &[f64], delta: &[f64]) -> Result<f64> {
    Ok(solve_any(&inst.with_budgets(gamma, delta)?)?.0.objective)
}

fn monotonicity(inst: &UCInstance) -> Result<(bool, String)> {
    let g = &inst.uncertainty.gamma_q;
    let d = &inst.uncertainty.delta_p;
    let scaled = |v: &[f64], k: usize| -> Vec<f64> {
        v.iter()
            .map(|x| x * k as f64 / (MONOTONE_GRID - 1) as f64)
            .collect()
    };
    let mut ok = true;
    let mut detail = String::new();
    for (label, vary_gamma) in [("gamma", true), ("delta", false)] {
        let mut prev = f64::NEG_INFINITY;
        let mut vals = Vec::new();
        for k in 0..MONOTONE_GRID {
            let v = if vary_gamma {
                objective_at(inst, &scaled(g, k), d)?
            } else {
                objective_at(inst, g, &scaled(d, k))?
            };
            ok &= v >= prev - 1e-6 * (1.0 + v.abs());
            prev = v;
            vals.push(format!("{v:.6}"));
        }
        detail.push_str(&format!("{label} [{}] ", vals.join(" ")));
    }
    Ok((ok, detail.trim_end().to_string()))
}

fn zero_budget_reduction(inst: &UCInstance) -> Result<(bool, String)> {
    let zeros = vec![0.0; inst.periods];
    let reduced = objective_at(inst, &zeros, &zeros)?;
    let plain = solve_milp(&build_robust_primal(
        &inst.deterministic().with_norm(NormOrder::One),
    )?)?
    .objective;
    Ok((
        (reduced - plain).abs() <= 1e-6,
        format!("zero budgets {reduced:.6} deterministic {plain:.6}"),
    ))
}

fn rows_consistent(t: &PaymentTable) -> bool {
    t.rows
        .iter()
        .all(|r| r.total == r.commitment + r.energy + r.uncertainty + r.uplift)
        && t.grand_total == t.rows.iter().map(|r| r.total).sum::<f64>()
}

fn pricing_checks(s: &mut Suite, sol: &AroSolution, cert: &DualCertificate) {
    let inst = s.inst;
    let bid = pay_as_bid_day_ahead(sol, inst);
    let uni = adaptive_uniform_day_ahead(sol, cert, inst);
    let worst = bid
        .rows
        .iter()
        .zip(&uni.rows)
        .map(|(a, b)| (a.total - b.total).abs())
        .fold(0.0, f64::max);
    s.record(
        "theorem-1",
        worst <= THEOREM_TOL,
        format!("largest pay-as-bid vs uniform gap {worst:.3e}"),
    );
    let mut tables = vec![bid, uni];
    match worst_case_settlement(sol, cert, inst) {
        Ok((f, g)) => {
            s.record(
                "theorem-2",
                true,
                format!("sum f {:.6} objective {:.6}", f.grand_total, sol.objective),
            );
            tables.push(f);
            tables.push(g);
        }
        Err(e) => s.record("theorem-2", false, e.to_string()),
    }
    let mut audit = Vec::new();
    let mut ok = true;
    for g in &inst.generators {
        match decentralized_profit(inst, cert, sol, &g.id) {
            Ok(r) => audit.push(format!("{} {:.6}", g.id, r.decentralized)),
            Err(e) => {
                ok = false;
                audit.push(e.to_string());
            }
        }
    }
    s.record("theorem-3", ok, audit.join("; "));
    match deterministic_marginal(inst) {
        Ok(t) => tables.push(t),
        Err(e) => s.record("payment-rows", false, e.to_string()),
    }
    let chull_applies = inst.periods <= MAX_PERIODS && inst.n_gens() <= MAX_GENERATORS;
    if chull_applies {
        match convex_hull_prices(inst) {
            Ok(ch) => {
                s.record(
                    "convex-hull-bound",
                    ch.dual_objective <= ch.uc_objective + 1e-6 && ch.gap >= -1e-6,
                    format!(
                        "dual {:.6} uc {:.6} gap {:.6}",
                        ch.dual_objective, ch.uc_objective, ch.gap
                    ),
                );
                tables.push(ch.payment_table());
            }
            Err(e) => s.record("convex-hull-bound", false, e.to_string()),
        }
    } else {
        s.skip(
            "convex-hull-bound",
            "instance exceeds the enumeration limits",
        );
    }
    let ok = tables.iter().all(rows_consistent);
    s.record("payment-rows", ok, format!("{} tables", tables.len()));
}

fn intraday_checks(s: &mut Suite, sol: &AroSolution, cert: &DualCertificate, rng: &mut ChaCha8Rng) {
    let _ = cert;
    let inst = s.inst;
    let order = inst.norm_order();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut failed = None;
    for _ in 0..INTRADAY_SAMPLES {
        let t = rng.gen_range(0..inst.periods);
        let d: Vec<f64> = sample_ball(rng, inst.n_nodes(), order, inst.gamma(t))
            .into_iter()
            .map(f64::abs)
            .collect();
        let r = sample_ball(rng, inst.n_gens(), order, inst.delta(t));
        match intraday_dispatch_realized(inst, sol, t, &d, &r) {
            Ok(x) => worst = worst.max(x.cost - x.bound),
            Err(e) => failed = Some(e),
        }
    }
    match failed {
        Some(e) => s.record("intraday-bound", false, e.to_string()),
        None => s.record(
            "intraday-bound",
            worst <= 1e-6,
            format!("{INTRADAY_SAMPLES} realizations, largest cost - bound {worst:.3e}"),
        ),
    }

    let wc = worst_case_realization(sol, inst);
    let mut detail = Vec::new();
    let mut ok = true;
    for t in 0..inst.periods {
        let d = &wc.load_residual[t];
        if d.iter().any(|v| *v < 0.0) {
            detail.push(format!("t{t}: worst-case load has a negative entry"));
            continue;
        }
        match intraday_dispatch_realized(inst, sol, t, d, &wc.capacity_residual[t]) {
            Ok(x) => {
                ok &= (x.cost - x.bound).abs() <= 1e-6;
                detail.push(format!("t{t}: cost {:.6} bound {:.6}", x.cost, x.bound));
            }
            Err(e) => {
                ok = false;
                detail.push(e.to_string());
            }
        }
    }
    s.record("intraday-worst-case", ok, detail.join("; "));

    match realization_sweep(inst, sol, 21) {
        Ok(pts) => {
            let ok = pts.windows(2).all(|w| w[1].price >= w[0].price - 1e-9);
            s.record(
                "intraday-price-monotone",
                ok,
                "21-point sweep on the first node",
            );
        }
        Err(e) => s.record("intraday-price-monotone", false, e.to_string()),
    }
}

/// `Err` with the first failed check, for callers that want an error value.
pub fn require(report: &VerifyReport) -> Result<()> {
    match report.failures().next() {
        None => Ok(()),
        Some(c) => Err(Error::Consistency(format!("{}: {}", c.name, c.detail))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for order in [NormOrder::One, NormOrder::Two, NormOrder::Infinity] {
            for _ in 0..200 {
                let x = sample_ball(&mut rng, 4, order, 3.0);
                assert!(norm(&x, order) <= 3.0 + 1e-12);
            }
        }
    }

    #[test]
    fn scarf_suite_passes() {
        let inst = builtin_instance("scarf").unwrap();
        let r = verify_instance(&inst, 0).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn same_seed_same_report() {
        let inst = builtin_instance("scarf").unwrap();
        assert_eq!(
            verify_instance(&inst, 3).unwrap(),
            verify_instance(&inst, 3).unwrap()
        );
    }
}
