//! Settlement schemes over a solved robust commitment.
//!
//! Every formula works on the generic robust program: a generator's private
//! rows are those it owns, and its decisions are the variables it owns. For
//! the single-period counterpart this reduces to the familiar
//! `μu + (ρ − β̄_ii)x + σ(Γ‖V_i‖ + Δ‖ψ̄_i‖) + ζ(Γ‖V_i‖ + Δ‖Z_i‖)` split.

pub mod convex_hull;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fixed6;
use crate::instance::UCInstance;
use crate::norms::norm;
use crate::robust::program::{Owner, RowKind, VarKind};
use crate::robust::{solve_aro, AroSolution, DualCertificate};

pub use convex_hull::{convex_hull_prices, ConvexHullResult};

/// Tolerance of the settlement theorems.
pub const THEOREM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PaymentRow {
    pub generator: String,
    pub commitment: f64,
    pub energy: f64,
    pub uncertainty: f64,
    pub uplift: f64,
    pub total: f64,
}

impl PaymentRow {
    pub fn new(
        generator: &str,
        commitment: f64,
        energy: f64,
        uncertainty: f64,
        uplift: f64,
    ) -> Self {
        PaymentRow {
            generator: generator.to_string(),
            commitment,
            energy,
            uncertainty,
            uplift,
            total: commitment + energy + uncertainty + uplift,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaymentTable {
    pub scheme: String,
    pub rows: Vec<PaymentRow>,
    pub grand_total: f64,
}

impl PaymentTable {
    pub fn new(scheme: &str, rows: Vec<PaymentRow>) -> Self {
        let grand_total = rows.iter().map(|r| r.total).sum();
        PaymentTable {
            scheme: scheme.to_string(),
            rows,
            grand_total,
        }
    }

    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total).collect()
    }

    pub const CSV_HEADER: &'static str =
        "scheme,generator,commitment,energy,uncertainty,uplift,total";

    /// CSV with a header row; numbers at six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let nums = [r.commitment, r.energy, r.uncertainty, r.uplift, r.total].map(fixed6);
            let _ = writeln!(out, "{},{},{}", self.scheme, r.generator, nums.join(","));
        }
        out
    }
}

/// Per-generator pieces of the dual settlement, shared by the schemes.
struct Ledger<'a> {
    sol: &'a AroSolution,
    cert: &'a DualCertificate,
}

impl Ledger<'_> {
    fn owned_var(&self, v: usize, i: usize) -> bool {
        self.sol.phase2.vars[v].owner == Owner::Generator(i)
    }

    fn was_binary(&self, v: usize) -> bool {
        self.sol.model.program.vars[v].kind == VarKind::Binary
    }

    fn private_rows(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.sol
            .phase2
            .rows
            .iter()
            .enumerate()
            .filter(move |(_, r)| !r.skip && r.owner == Owner::Generator(i))
            .map(|(k, _)| k)
    }

    fn price_revenue(&self, i: usize) -> f64 {
        self.cert
            .mu
            .iter()
            .zip(&self.sol.policy.u[i])
            .map(|(m, u)| m * u)
            .sum()
    }

    /// `Σ_{private} λ_r Σ_k β_k ‖s_k‖_*`.
    fn uncertainty_premium(&self, i: usize) -> f64 {
        let p = &self.sol.phase2;
        let dual = p.dual_norm();
        self.private_rows(i)
            .map(|r| {
                let terms: f64 = p.rows[r]
                    .terms
                    .iter()
                    .filter(|t| t.active())
                    .map(|t| t.budget * norm(&t.eval(&self.sol.y), dual))
                    .sum();
                self.cert.multipliers.lambda[r] * terms
            })
            .sum()
    }

    /// `−Σ_{private} λ_r b_r + Σ_{private} w_k·m_k`: the fixing duals times the
    /// commitment (`ρx*` for the single-period counterpart).
    fn kappa(&self, i: usize) -> f64 {
        let p = &self.sol.phase2;
        let m = &self.cert.multipliers;
        self.private_rows(i)
            .map(|r| {
                let row = &p.rows[r];
                let wm: f64 = row
                    .terms
                    .iter()
                    .enumerate()
                    .filter_map(|(k, t)| {
                        let w = m.w[r].get(k).filter(|w| !w.is_empty())?;
                        Some(
                            w.iter()
                                .zip(&t.comps)
                                .map(|(a, c)| a * c.constant)
                                .sum::<f64>(),
                        )
                    })
                    .sum();
                wm - m.lambda[r] * row.rhs
            })
            .sum()
    }

    /// `Σ_{private} w_k·(M_{k,x} x*)`: the commitment part of the norm
    /// arguments weighted by their multipliers (`β̄_ii x*` single-period).
    fn commitment_in_norms(&self, i: usize) -> f64 {
        let p = &self.sol.phase2;
        let m = &self.cert.multipliers;
        let mut s = 0.0;
        for r in self.private_rows(i) {
            for (k, t) in p.rows[r].terms.iter().enumerate() {
                let Some(w) = m.w[r].get(k).filter(|w| !w.is_empty()) else {
                    continue;
                };
                for (wj, c) in w.iter().zip(&t.comps) {
                    for &(v, a) in &c.coeffs {
                        if self.was_binary(v) {
                            s += wj * a * self.sol.y[v];
                        }
                    }
                }
            }
        }
        s
    }

    /// `Σ_{rows of kind} (λ_r a_r·y_i + w_r·M_r y_i)`, restricted to the
    /// variables generator `i` owns.
    fn shared_contribution(&self, i: usize, pick: impl Fn(usize) -> bool) -> (f64, f64) {
        let p = &self.sol.phase2;
        let m = &self.cert.multipliers;
        let y = &self.sol.y;
        let (mut lin, mut terms) = (0.0, 0.0);
        for (r, row) in p.rows.iter().enumerate() {
            if row.skip || row.owner != Owner::Market || !pick(r) {
                continue;
            }
            for &(v, a) in &row.lin {
                if self.owned_var(v, i) {
                    lin += m.lambda[r] * a * y[v];
                }
            }
            for (k, t) in row.terms.iter().enumerate() {
                let Some(w) = m.w[r].get(k).filter(|w| !w.is_empty()) else {
                    continue;
                };
                for (wj, c) in w.iter().zip(&t.comps) {
                    for &(v, a) in &c.coeffs {
                        if self.owned_var(v, i) {
                            terms += wj * a * y[v];
                        }
                    }
                }
            }
        }
        (lin, terms)
    }
}

/// As-bid commitment cost of generator `i` (commitment, no-load, start-up).
fn commitment_cost(sol: &AroSolution, i: usize) -> f64 {
    let p = &sol.phase2;
    (0..p.vars.len())
        .filter(|&v| p.vars[v].owner == Owner::Generator(i))
        .map(|v| p.vars[v].cost * sol.y[v])
        .sum()
}

fn energy_cost(sol: &AroSolution, inst: &UCInstance, i: usize) -> f64 {
    let c = inst.generators[i].energy_cost;
    sol.policy.u[i].iter().map(|u| c * u).sum()
}

fn ids(inst: &UCInstance) -> impl Iterator<Item = (usize, &str)> {
    inst.generators
        .iter()
        .enumerate()
        .map(|(i, g)| (i, g.id.as_str()))
}

/// Each generator paid its bid for the scheduled commitment and
/// non-adaptive dispatch.
pub fn pay_as_bid_day_ahead(sol: &AroSolution, inst: &UCInstance) -> PaymentTable {
    let rows = ids(inst)
        .map(|(i, id)| {
            PaymentRow::new(
                id,
                commitment_cost(sol, i),
                energy_cost(sol, inst, i),
                0.0,
                0.0,
            )
        })
        .collect();
    PaymentTable::new("payasbid", rows)
}

/// Uniform price on the non-adaptive dispatch, plus the commitment uplift
/// and the uncertainty premium of the private robust rows.
pub fn adaptive_uniform_day_ahead(
    sol: &AroSolution,
    cert: &DualCertificate,
    inst: &UCInstance,
) -> PaymentTable {
    uniform_table("uniform", sol, cert, inst)
}

fn uniform_table(
    scheme: &str,
    sol: &AroSolution,
    cert: &DualCertificate,
    inst: &UCInstance,
) -> PaymentTable {
    let l = Ledger { sol, cert };
    let rows = ids(inst)
        .map(|(i, id)| {
            let uplift = l.kappa(i) - l.commitment_in_norms(i);
            PaymentRow::new(
                id,
                0.0,
                l.price_revenue(i),
                l.uncertainty_premium(i),
                uplift,
            )
        })
        .collect();
    PaymentTable::new(scheme, rows)
}

/// Settlement at the dual-certified worst case. `f` books the as-bid cost
/// of the realized dispatch; `g` the price-based payment. Both are checked
/// against each other and against the robust objective before returning.
pub fn worst_case_settlement(
    sol: &AroSolution,
    cert: &DualCertificate,
    inst: &UCInstance,
) -> Result<(PaymentTable, PaymentTable)> {
    let l = Ledger { sol, cert };
    let p = &sol.phase2;
    let is_kind = |k: RowKind| move |r: usize| p.rows[r].kind == k;
    let demand: Vec<usize> = sol.model.layout.demand_row.clone();
    let mut f = Vec::new();
    let mut g = Vec::new();
    for (i, id) in ids(inst) {
        let (cost_lin, cost_terms) = l.shared_contribution(i, is_kind(RowKind::Cost));
        f.push(PaymentRow::new(
            id,
            commitment_cost(sol, i),
            cost_lin,
            cost_terms,
            0.0,
        ));
        let (dem_lin, _) = l.shared_contribution(i, |r| demand.contains(&r));
        let (other_lin, other_terms) = l.shared_contribution(i, |r| {
            p.rows[r].kind != RowKind::Cost && !demand.contains(&r)
        });
        g.push(PaymentRow::new(
            id,
            l.kappa(i),
            -dem_lin,
            -(other_lin + other_terms),
            0.0,
        ));
    }
    let f = PaymentTable::new("worst-case-cost", f);
    let g = PaymentTable::new("worst-case-payment", g);
    for (a, b) in f.rows.iter().zip(&g.rows) {
        if (a.total - b.total).abs() > THEOREM_TOL {
            return Err(Error::Consistency(format!(
                "worst-case settlement of {}: cost {} vs payment {}",
                a.generator, a.total, b.total
            )));
        }
    }
    if (f.grand_total - sol.objective).abs() > THEOREM_TOL {
        return Err(Error::Consistency(format!(
            "worst-case settlement total {} differs from the robust objective {}",
            f.grand_total, sol.objective
        )));
    }
    Ok((f, g))
}

/// Two-phase deterministic solve priced at the balance duals, with the
/// commitment duals as uplift.
pub fn deterministic_marginal(inst: &UCInstance) -> Result<PaymentTable> {
    let det = inst.deterministic();
    let (sol, cert) = solve_aro(&det)?;
    Ok(uniform_table("marginal", &sol, &cert, &det))
}
