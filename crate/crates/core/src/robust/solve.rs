//! Two-phase ARO solve: commitment MILP, then the continuous counterpart and
//! its explicit dual at the fixed commitment.

use crate::error::{Error, Result};
use crate::instance::{RealizationVector, UCInstance};
use crate::lp::{lexicographic_min, solve_lp, LpStatus, Relation};
use crate::mip::{solve_milp, MipStatus};
use crate::norms::{max_linear_over_ball, NormOrder};

use super::model::{build_uc_model, UcLayout, UcModel};
use super::program::{Multipliers, RobustProgram, RowKind};

/// Relative tolerance of the strong-duality check.
pub const DUALITY_TOL: f64 = 1e-6;
/// Size above which a dual or reduced cost marks a binding condition.
const FACE_EPS: f64 = 1e-9;

/// Binary decisions as 0/1 values, indexed `[generator][period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Commitments {
    pub on: Vec<Vec<f64>>,
    pub startup: Vec<Vec<f64>>,
    pub shutdown: Vec<Vec<f64>>,
}

/// `p_it(d, r) = u_it + Σ_j v[t][i][j] d_jt + Σ_k z[t][i][k] r_kt`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdrPolicy {
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<Vec<f64>>>,
    pub z: Vec<Vec<Vec<f64>>>,
}

impl LdrPolicy {
    pub fn dispatch(&self, t: usize, i: usize, d: &[f64], r: &[f64]) -> f64 {
        let vd: f64 = self.v[t][i].iter().zip(d).map(|(a, b)| a * b).sum();
        let zr: f64 = self.z[t][i].iter().zip(r).map(|(a, b)| a * b).sum();
        self.u[i][t] + vd + zr
    }
}

#[derive(Debug, Clone)]
pub struct AroSolution {
    pub commitments: Commitments,
    pub policy: LdrPolicy,
    /// Worst-case dispatch cost.
    pub eta: f64,
    /// Commitment costs plus `eta`.
    pub objective: f64,
    /// Point of the robust program (binaries at their committed values).
    pub y: Vec<f64>,
    pub model: UcModel,
    /// Continuous program at the fixed commitment; the certificate's raw
    /// multipliers are indexed by its rows.
    pub phase2: RobustProgram,
}

/// Named dual families of the fixed-commitment counterpart. Vectors are
/// indexed `[t]`, `[t][j]`, `[i][t]` or `[t][i][j]` as listed.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub nu: f64,
    /// Balance price per period.
    pub mu: Vec<f64>,
    /// Multiplier of the robust balance row `[t]`.
    pub lambda: Vec<f64>,
    /// Commitment-fixing duals `[i][t]`.
    pub rho: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
    pub zeta: Vec<Vec<f64>>,
    pub alpha: Vec<Vec<f64>>,
    pub alpha_bar: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub theta_bar: Vec<Vec<f64>>,
    pub beta: Vec<Vec<Vec<f64>>>,
    pub beta_bar: Vec<Vec<Vec<f64>>>,
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub gamma_bar: Vec<Vec<Vec<f64>>>,
    pub dual_objective: f64,
    pub multipliers: Multipliers,
    /// Set when the certificate comes from an outer approximation.
    pub approximate: bool,
}

/// Norm arguments of the robust rows, `[t]`-indexed like the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustConstraintBundle {
    pub omega: Vec<Vec<f64>>,
    pub omega_bar: Vec<Vec<f64>>,
    pub tau: Vec<Vec<f64>>,
    pub tau_bar: Vec<Vec<f64>>,
    pub psi: Vec<Vec<Vec<f64>>>,
    pub psi_bar: Vec<Vec<Vec<f64>>>,
    pub phi: Vec<Vec<Vec<f64>>>,
    pub phi_bar: Vec<Vec<Vec<f64>>>,
}

impl RobustConstraintBundle {
    pub fn new(sol: &AroSolution, inst: &UCInstance) -> Self {
        let (n, m) = (inst.n_gens(), inst.n_nodes());
        let p = &sol.policy;
        let mut b = RobustConstraintBundle {
            omega: Vec::new(),
            omega_bar: Vec::new(),
            tau: Vec::new(),
            tau_bar: Vec::new(),
            psi: Vec::new(),
            psi_bar: Vec::new(),
            phi: Vec::new(),
            phi_bar: Vec::new(),
        };
        for t in 0..inst.periods {
            let c = |i: usize| inst.generators[i].energy_cost;
            b.omega.push(
                (0..m)
                    .map(|j| (0..n).map(|i| c(i) * p.v[t][i][j]).sum())
                    .collect(),
            );
            b.omega_bar.push(
                (0..n)
                    .map(|k| (0..n).map(|i| c(i) * p.z[t][i][k]).sum())
                    .collect(),
            );
            b.tau.push(
                (0..m)
                    .map(|j| 1.0 - (0..n).map(|i| p.v[t][i][j]).sum::<f64>())
                    .collect(),
            );
            b.tau_bar.push(
                (0..n)
                    .map(|k| -(0..n).map(|i| p.z[t][i][k]).sum::<f64>())
                    .collect(),
            );
            b.psi.push(p.v[t].clone());
            b.psi_bar.push(
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|k| {
                                let e = if k == i {
                                    sol.commitments.on[i][t]
                                } else {
                                    0.0
                                };
                                e - p.z[t][i][k]
                            })
                            .collect()
                    })
                    .collect(),
            );
            b.phi.push(p.v[t].clone());
            b.phi_bar.push(p.z[t].clone());
        }
        b
    }
}

/// Solves the robust counterpart of `inst` (L1 or L∞ sets).
///
/// The policy is chosen, among optimal ones, to minimize the worst-case
/// adaptive cost, then the dispatch in generator order; the balance prices are the lexicographically smallest
/// over the optimal dual face.
pub fn solve_aro(inst: &UCInstance) -> Result<(AroSolution, DualCertificate)> {
    if inst.norm_order() == NormOrder::Two {
        return Err(Error::UnsupportedNorm(NormOrder::Two));
    }
    let model = build_uc_model(inst)?;
    let lin = model.program.linearize();
    let first = solve_milp(&lin.mip)?;
    match first.status {
        MipStatus::Optimal => {}
        MipStatus::Infeasible => {
            return Err(Error::Infeasible(
                "no commitment covers the load over the uncertainty set".into(),
            ))
        }
        MipStatus::Unbounded => return Err(Error::Unbounded("robust counterpart".into())),
    }
    let nv = model.program.vars.len();
    let on: Vec<Vec<f64>> = model
        .layout
        .on
        .iter()
        .map(|row| row.iter().map(|&k| first.x[k].round()).collect())
        .collect();
    let ybin = model.binary_point(inst, &on)?;
    let fixed = model.program.fix_binaries(&ybin);
    let y = continuous_phase(&model, &fixed)?;
    let z = fixed.objective(&y);

    let dual = fixed.dual();
    let ds = solve_lp(&dual.lp)?;
    if ds.status != LpStatus::Optimal {
        return Err(Error::Consistency(format!(
            "dual of the fixed counterpart is {:?}",
            ds.status
        )));
    }
    if (ds.objective - z).abs() > DUALITY_TOL * (1.0 + z.abs()) {
        return Err(Error::Consistency(format!(
            "duality gap: primal {z}, dual {}",
            ds.objective
        )));
    }
    let keys: Vec<usize> = model
        .layout
        .demand_row
        .iter()
        .filter_map(|&r| dual.lambda[r])
        .collect();
    let (dx, dual_objective) = lexicographic_min(&dual.lp, &keys, FACE_EPS)?
        .ok_or_else(|| Error::Consistency("dual face selection failed".into()))?;
    let mult = dual.read(&dx);

    debug_assert_eq!(y.len(), nv);
    let sol = assemble_solution(model, fixed, y);
    let cert = assemble_certificate(inst, &sol, mult, dual_objective, false);
    Ok((sol, cert))
}

/// Optimal continuous point of the fixed program, tie-broken toward the
/// smallest adaptive (norm) part of the cost row and then toward the
/// lexicographically smallest dispatch. `eta` is reset to the
/// exact worst-case cost.
fn continuous_phase(model: &UcModel, fixed: &RobustProgram) -> Result<Vec<f64>> {
    let nv = fixed.vars.len();
    let lin = fixed.linearize();
    let mut lp = lin.mip.lp.clone();
    let s = solve_lp(&lp)?;
    match s.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Consistency(
                "fixed commitment lost feasibility in the continuous phase".into(),
            ))
        }
        LpStatus::Unbounded => return Err(Error::Unbounded("continuous phase".into())),
    }
    // adaptive cost a = Σ β·epigraph over the cost row, minimized on the face
    let a = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
    let mut def = vec![(a, -1.0)];
    let cr = model.layout.cost_row;
    for (k, t) in fixed.rows[cr].terms.iter().enumerate() {
        if let Some(vars) = &lin.epigraph[cr][k] {
            def.extend(vars.iter().map(|&e| (e, t.budget)));
        }
    }
    lp.add_row(def, Relation::Eq, 0.0);
    // then the dispatch, lowest generator index first
    let mut keys = vec![a];
    keys.extend(model.layout.u.iter().flatten().copied());
    let x = lexicographic_min(&lp, &keys, FACE_EPS)?
        .map(|(x, _)| x)
        .unwrap_or(s.x);
    let mut y = x[..nv].to_vec();
    let eta = model.layout.eta;
    y[eta] = 0.0;
    y[eta] = fixed.row_lhs(cr, &y);
    Ok(y)
}

pub(crate) fn assemble_solution(model: UcModel, fixed: RobustProgram, y: Vec<f64>) -> AroSolution {
    let l = &model.layout;
    let grid = |ix: &Vec<Vec<Option<usize>>>| -> Vec<Vec<f64>> {
        ix.iter()
            .map(|r| r.iter().map(|k| UcLayout::value(*k, &y)).collect())
            .collect()
    };
    let on: Vec<Vec<f64>> =
        l.on.iter()
            .map(|r| r.iter().map(|&k| y[k].round()).collect())
            .collect();
    let flag = |ix: &Vec<Vec<Option<usize>>>| -> Vec<Vec<f64>> {
        ix.iter()
            .map(|r| r.iter().map(|k| UcLayout::value(*k, &y).round()).collect())
            .collect()
    };
    let commitments = Commitments {
        on,
        startup: flag(&l.startup),
        shutdown: flag(&l.shutdown),
    };
    let policy = LdrPolicy {
        u: l.u
            .iter()
            .map(|r| r.iter().map(|&k| y[k]).collect())
            .collect(),
        v: l.v.iter().map(grid).collect(),
        z: l.z.iter().map(grid).collect(),
    };
    let eta = y[l.eta];
    let objective = fixed.objective(&y);
    AroSolution {
        commitments,
        policy,
        eta,
        objective,
        y,
        model,
        phase2: fixed,
    }
}

pub(crate) fn assemble_certificate(
    inst: &UCInstance,
    sol: &AroSolution,
    m: Multipliers,
    dual_objective: f64,
    approximate: bool,
) -> DualCertificate {
    let l = &sol.model.layout;
    let (n, nn, tt) = (inst.n_gens(), inst.n_nodes(), inst.periods);
    let p = &sol.phase2;
    let w = |r: usize, k: usize, len: usize| -> Vec<f64> {
        match m.w[r].get(k) {
            Some(v) if !v.is_empty() => v.clone(),
            _ => vec![0.0; len],
        }
    };
    let mut fix_row = vec![None; p.vars.len()];
    for (r, row) in p.rows.iter().enumerate() {
        if let RowKind::Fix(v) = row.kind {
            fix_row[v] = Some(r);
        }
    }
    let cr = l.cost_row;
    let per_gen = |rows: &Vec<Vec<usize>>, k: usize, len: usize| -> Vec<Vec<Vec<f64>>> {
        (0..tt)
            .map(|t| (0..n).map(|i| w(rows[i][t], k, len)).collect())
            .collect()
    };
    DualCertificate {
        nu: m.lambda[cr],
        mu: l.demand_row.iter().map(|&r| m.lambda[r]).collect(),
        lambda: l.balance_row.iter().map(|&r| m.lambda[r]).collect(),
        rho: l
            .on
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| fix_row[v].map_or(0.0, |q| m.lambda[q]))
                    .collect()
            })
            .collect(),
        sigma: l
            .cap_row
            .iter()
            .map(|r| r.iter().map(|&q| m.lambda[q]).collect())
            .collect(),
        zeta: l
            .floor_row
            .iter()
            .map(|r| r.iter().map(|&q| m.lambda[q]).collect())
            .collect(),
        alpha: (0..tt).map(|t| w(cr, 2 * t, nn)).collect(),
        alpha_bar: (0..tt).map(|t| w(cr, 2 * t + 1, n)).collect(),
        theta: l.balance_row.iter().map(|&r| w(r, 0, nn)).collect(),
        theta_bar: l.balance_row.iter().map(|&r| w(r, 1, n)).collect(),
        beta: per_gen(&l.cap_row, 0, nn),
        beta_bar: per_gen(&l.cap_row, 1, n),
        gamma: per_gen(&l.floor_row, 0, nn),
        gamma_bar: per_gen(&l.floor_row, 1, n),
        dual_objective,
        multipliers: m,
        approximate,
    }
}

/// Worst-case residuals of the committed policy, per period: the
/// lowest-index maximizer of `Σ_j (Σ_i C_i V_ij) d_j` over the load set, and
/// of the capacity analogue over the capacity set.
pub fn worst_case_realization(sol: &AroSolution, inst: &UCInstance) -> RealizationVector {
    let b = RobustConstraintBundle::new(sol, inst);
    let order = inst.norm_order();
    let mut out = RealizationVector::zeros(inst);
    for t in 0..inst.periods {
        out.load_residual[t] = max_linear_over_ball(&b.omega[t], order, inst.gamma(t)).1;
        out.capacity_residual[t] = max_linear_over_ball(&b.omega_bar[t], order, inst.delta(t)).1;
    }
    out
}
