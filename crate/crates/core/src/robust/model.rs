//! The LDR robust counterpart of a unit-commitment instance.

use crate::error::{Error, Result};
use crate::instance::UCInstance;
use crate::lp::{LpProblem, Relation};
use crate::mip::MipProblem;
use crate::norms::NormOrder;

use super::program::{Affine, NormTerm, Owner, RRow, RobustProgram, RowKind, VarKind};

/// Variable and row positions inside the robust program.
///
/// Every robust row carries two norm terms in fixed slots: slot 0 is the
/// load term (budget Γ_t) and slot 1 the capacity term (budget Δ_t). The cost
/// row has the pair `2t, 2t + 1` for period `t`. Policy variables are omitted
/// (`None`) when their budget is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UcLayout {
    pub eta: usize,
    pub on: Vec<Vec<usize>>,
    pub startup: Vec<Vec<Option<usize>>>,
    pub shutdown: Vec<Vec<Option<usize>>>,
    pub u: Vec<Vec<usize>>,
    /// `v[t][i][j]`
    pub v: Vec<Vec<Vec<Option<usize>>>>,
    /// `z[t][i][k]`
    pub z: Vec<Vec<Vec<Option<usize>>>>,
    pub cost_row: usize,
    pub balance_row: Vec<usize>,
    pub demand_row: Vec<usize>,
    pub cap_row: Vec<Vec<usize>>,
    pub floor_row: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcModel {
    pub program: RobustProgram,
    pub layout: UcLayout,
}

impl UcLayout {
    pub fn value(idx: Option<usize>, y: &[f64]) -> f64 {
        idx.map_or(0.0, |k| y[k])
    }
}

fn term(budget: f64, comps: Vec<Affine>) -> NormTerm {
    NormTerm { budget, comps }
}

fn single(v: Option<usize>, a: f64) -> Affine {
    Affine {
        coeffs: v.map(|k| vec![(k, a)]).unwrap_or_default(),
        constant: 0.0,
    }
}

fn comps_if(active: bool, f: impl FnOnce() -> Vec<Affine>) -> Vec<Affine> {
    if active {
        f()
    } else {
        Vec::new()
    }
}

/// Builds the robust program of `inst` for any norm order.
pub fn build_uc_model(inst: &UCInstance) -> Result<UcModel> {
    inst.validate()?;
    let (n, m, tt) = (inst.n_gens(), inst.n_nodes(), inst.periods);
    let mut p = RobustProgram::new(inst.norm_order());
    let eta = p.add_var(VarKind::Free, 1.0, Owner::Market);

    let mut on = vec![Vec::with_capacity(tt); n];
    let mut u = vec![Vec::with_capacity(tt); n];
    let mut startup = vec![Vec::with_capacity(tt); n];
    let mut shutdown = vec![Vec::with_capacity(tt); n];
    let mut v = Vec::with_capacity(tt);
    let mut z = Vec::with_capacity(tt);
    for t in 0..tt {
        let (gam, del) = (inst.gamma(t) > 0.0, inst.delta(t) > 0.0);
        let mut vt = Vec::with_capacity(n);
        let mut zt = Vec::with_capacity(n);
        for (i, g) in inst.generators.iter().enumerate() {
            let own = Owner::Generator(i);
            on[i].push(p.add_var(VarKind::Binary, g.fixed_cost_per_period(), own));
            u[i].push(p.add_var(VarKind::Free, 0.0, own));
            vt.push(
                (0..m)
                    .map(|_| gam.then(|| p.add_var(VarKind::Free, 0.0, own)))
                    .collect::<Vec<_>>(),
            );
            zt.push(
                (0..n)
                    .map(|_| del.then(|| p.add_var(VarKind::Free, 0.0, own)))
                    .collect::<Vec<_>>(),
            );
            if tt > 1 {
                startup[i].push(Some(p.add_var(VarKind::Binary, g.startup_cost, own)));
                shutdown[i].push(Some(p.add_var(VarKind::Binary, 0.0, own)));
            } else {
                startup[i].push(None);
                shutdown[i].push(None);
            }
        }
        v.push(vt);
        z.push(zt);
    }

    // worst-case dispatch cost: Σ C u + Γ‖ω‖ + Δ‖ω̄‖ ≤ η
    let mut lin = vec![(eta, -1.0)];
    let mut terms = Vec::with_capacity(2 * tt);
    for t in 0..tt {
        let (gam, del) = (inst.gamma(t), inst.delta(t));
        for (i, g) in inst.generators.iter().enumerate() {
            lin.push((u[i][t], g.energy_cost));
        }
        let cost_comp = |vars: Vec<Option<usize>>| Affine {
            coeffs: vars
                .into_iter()
                .zip(&inst.generators)
                .filter_map(|(k, g)| k.map(|k| (k, g.energy_cost)))
                .collect(),
            constant: 0.0,
        };
        terms.push(term(
            gam,
            comps_if(gam > 0.0, || {
                (0..m)
                    .map(|j| cost_comp((0..n).map(|i| v[t][i][j]).collect()))
                    .collect()
            }),
        ));
        terms.push(term(
            del,
            comps_if(del > 0.0, || {
                (0..n)
                    .map(|k| cost_comp((0..n).map(|i| z[t][i][k]).collect()))
                    .collect()
            }),
        ));
    }
    let cost_row = p.add_row(RRow {
        lin,
        terms,
        relation: Relation::Le,
        rhs: 0.0,
        owner: Owner::Market,
        kind: RowKind::Cost,
        skip: false,
    });

    let mut balance_row = Vec::with_capacity(tt);
    let mut demand_row = Vec::with_capacity(tt);
    let mut cap_row = vec![Vec::with_capacity(tt); n];
    let mut floor_row = vec![Vec::with_capacity(tt); n];
    for t in 0..tt {
        let (gam, del) = (inst.gamma(t), inst.delta(t));
        // τ_j = 1 − Σ_i V_ij, τ̄_k = −Σ_i Z_ik
        let tau = comps_if(gam > 0.0, || {
            (0..m)
                .map(|j| Affine {
                    coeffs: (0..n)
                        .filter_map(|i| v[t][i][j].map(|k| (k, -1.0)))
                        .collect(),
                    constant: 1.0,
                })
                .collect()
        });
        let tau_bar = comps_if(del > 0.0, || {
            (0..n)
                .map(|k| Affine {
                    coeffs: (0..n)
                        .filter_map(|i| z[t][i][k].map(|q| (q, -1.0)))
                        .collect(),
                    constant: 0.0,
                })
                .collect()
        });
        balance_row.push(p.add_row(RRow {
            lin: Vec::new(),
            terms: vec![term(gam, tau), term(del, tau_bar)],
            relation: Relation::Le,
            rhs: 0.0,
            owner: Owner::Market,
            kind: RowKind::Other,
            skip: false,
        }));
        demand_row.push(p.add_row(RRow {
            lin: (0..n).map(|i| (u[i][t], -1.0)).collect(),
            terms: Vec::new(),
            relation: Relation::Eq,
            rhs: -inst.total_load(t),
            owner: Owner::Market,
            kind: RowKind::Other,
            skip: false,
        }));
        for (i, g) in inst.generators.iter().enumerate() {
            let own = Owner::Generator(i);
            let psi = || {
                comps_if(gam > 0.0, || {
                    (0..m).map(|j| single(v[t][i][j], 1.0)).collect()
                })
            };
            // ψ̄_i = x_i e_i − Z_i
            let psi_bar = comps_if(del > 0.0, || {
                (0..n)
                    .map(|k| {
                        let mut a = single(z[t][i][k], -1.0);
                        if k == i {
                            a.coeffs.push((on[i][t], 1.0));
                        }
                        a
                    })
                    .collect()
            });
            cap_row[i].push(p.add_row(RRow {
                lin: vec![(u[i][t], 1.0), (on[i][t], -g.cap_max)],
                terms: vec![term(gam, psi()), term(del, psi_bar)],
                relation: Relation::Le,
                rhs: 0.0,
                owner: own,
                kind: RowKind::Other,
                skip: false,
            }));
            let phi_bar = comps_if(del > 0.0, || {
                (0..n).map(|k| single(z[t][i][k], 1.0)).collect()
            });
            let mut lin = vec![(u[i][t], -1.0)];
            if g.cap_min != 0.0 {
                lin.push((on[i][t], g.cap_min));
            }
            floor_row[i].push(p.add_row(RRow {
                lin,
                terms: vec![term(gam, psi()), term(del, phi_bar)],
                relation: Relation::Le,
                rhs: 0.0,
                owner: own,
                kind: RowKind::Other,
                skip: false,
            }));
        }
    }

    if tt > 1 {
        for (i, g) in inst.generators.iter().enumerate() {
            add_commitment_logic(&mut p, inst, i, &on[i], &startup[i], &shutdown[i]);
            if g.has_ramp_limits() {
                add_ramp_rows(
                    &mut p,
                    inst,
                    i,
                    &on[i],
                    &u[i],
                    &startup[i],
                    &shutdown[i],
                    &v,
                    &z,
                );
            }
        }
    }

    Ok(UcModel {
        program: p,
        layout: UcLayout {
            eta,
            on,
            startup,
            shutdown,
            u,
            v,
            z,
            cost_row,
            balance_row,
            demand_row,
            cap_row,
            floor_row,
        },
    })
}

fn logic(p: &mut RobustProgram, i: usize, lin: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
    p.add_row(RRow {
        lin,
        terms: Vec::new(),
        relation,
        rhs,
        owner: Owner::Generator(i),
        kind: RowKind::Logic,
        skip: false,
    });
}

fn add_commitment_logic(
    p: &mut RobustProgram,
    inst: &UCInstance,
    i: usize,
    on: &[usize],
    su: &[Option<usize>],
    sd: &[Option<usize>],
) {
    let g = &inst.generators[i];
    let init = if g.initial_on { 1.0 } else { 0.0 };
    for t in 0..inst.periods {
        let (ru, rd) = (su[t].expect("multiperiod"), sd[t].expect("multiperiod"));
        // x_t − x_{t−1} − ru_t + rd_t = 0
        let mut lin = vec![(on[t], 1.0), (ru, -1.0), (rd, 1.0)];
        if t > 0 {
            lin.push((on[t - 1], -1.0));
        }
        logic(p, i, lin, Relation::Eq, if t == 0 { init } else { 0.0 });
        logic(p, i, vec![(ru, 1.0), (on[t], -1.0)], Relation::Le, 0.0);
        if t > 0 {
            logic(p, i, vec![(ru, 1.0), (on[t - 1], 1.0)], Relation::Le, 1.0);
            logic(p, i, vec![(rd, 1.0), (on[t - 1], -1.0)], Relation::Le, 0.0);
        } else {
            logic(p, i, vec![(ru, 1.0)], Relation::Le, 1.0 - init);
            logic(p, i, vec![(rd, 1.0)], Relation::Le, init);
        }
        logic(p, i, vec![(rd, 1.0), (on[t], 1.0)], Relation::Le, 1.0);
        // a start in any of the last UT periods keeps the unit on now
        let ut = g.min_up as usize;
        if ut > 1 {
            let lo = (t + 1).saturating_sub(ut);
            let mut lin: Vec<(usize, f64)> = (lo..=t).map(|s| (su[s].unwrap(), 1.0)).collect();
            lin.push((on[t], -1.0));
            logic(p, i, lin, Relation::Le, 0.0);
        }
        let dt = g.min_down as usize;
        if dt > 1 {
            let lo = (t + 1).saturating_sub(dt);
            let mut lin: Vec<(usize, f64)> = (lo..=t).map(|s| (sd[s].unwrap(), 1.0)).collect();
            lin.push((on[t], 1.0));
            logic(p, i, lin, Relation::Le, 1.0);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn add_ramp_rows(
    p: &mut RobustProgram,
    inst: &UCInstance,
    i: usize,
    on: &[usize],
    u: &[usize],
    su: &[Option<usize>],
    sd: &[Option<usize>],
    v: &[Vec<Vec<Option<usize>>>],
    z: &[Vec<Vec<Option<usize>>>],
) {
    let g = &inst.generators[i];
    let (n, m) = (inst.n_gens(), inst.n_nodes());
    let ramp = g.ramp_rate.unwrap_or(g.cap_max);
    let up = g.startup_rate.unwrap_or(g.cap_max);
    let down = g.shutdown_rate.unwrap_or(g.cap_max);
    let block = |t: usize, sign: f64| -> [NormTerm; 2] {
        let (gam, del) = (inst.gamma(t), inst.delta(t));
        [
            term(
                gam,
                comps_if(gam > 0.0, || {
                    (0..m).map(|j| single(v[t][i][j], sign)).collect()
                }),
            ),
            term(
                del,
                comps_if(del > 0.0, || {
                    (0..n).map(|k| single(z[t][i][k], sign)).collect()
                }),
            ),
        ]
    };
    let row = |lin, terms| RRow {
        lin,
        terms,
        relation: Relation::Le,
        rhs: 0.0,
        owner: Owner::Generator(i),
        kind: RowKind::Other,
        skip: false,
    };
    for t in 0..inst.periods {
        if t == 0 {
            if !g.initial_on {
                // p_0 ≤ SU ru_0
                let r = row(
                    vec![(u[0], 1.0), (su[0].unwrap(), -up)],
                    block(0, 1.0).to_vec(),
                );
                p.add_row(r);
            }
            continue;
        }
        let mut terms = block(t, 1.0).to_vec();
        terms.extend(block(t - 1, -1.0));
        // p_t − p_{t−1} ≤ R x_{t−1} + SU ru_t
        p.add_row(row(
            vec![
                (u[t], 1.0),
                (u[t - 1], -1.0),
                (on[t - 1], -ramp),
                (su[t].unwrap(), -up),
            ],
            terms,
        ));
        let mut terms = block(t, -1.0).to_vec();
        terms.extend(block(t - 1, 1.0));
        // p_{t−1} − p_t ≤ R x_t + SD rd_t
        p.add_row(row(
            vec![
                (u[t - 1], 1.0),
                (u[t], -1.0),
                (on[t], -ramp),
                (sd[t].unwrap(), -down),
            ],
            terms,
        ));
    }
}

fn require_polyhedral(inst: &UCInstance) -> Result<()> {
    if inst.norm_order() == NormOrder::Two {
        return Err(Error::UnsupportedNorm(NormOrder::Two));
    }
    Ok(())
}

/// The linearized robust counterpart as a MILP.
pub fn build_robust_primal(inst: &UCInstance) -> Result<MipProblem> {
    require_polyhedral(inst)?;
    Ok(build_uc_model(inst)?.program.linearize().mip)
}

/// The explicit dual LP of the continuous counterpart at commitment `on[i][t]`.
pub fn build_robust_dual(inst: &UCInstance, on: &[Vec<f64>]) -> Result<LpProblem> {
    require_polyhedral(inst)?;
    let model = build_uc_model(inst)?;
    let y = model.binary_point(inst, on)?;
    Ok(model.program.fix_binaries(&y).dual().lp)
}

impl UcModel {
    /// A program point carrying commitment `on[i][t]` and the start-up and
    /// shut-down indicators it implies; continuous entries are zero.
    pub fn binary_point(&self, inst: &UCInstance, on: &[Vec<f64>]) -> Result<Vec<f64>> {
        let l = &self.layout;
        if on.len() != inst.n_gens() || on.iter().any(|r| r.len() != inst.periods) {
            return Err(Error::Dimension(format!(
                "commitment must be {} generators x {} periods",
                inst.n_gens(),
                inst.periods
            )));
        }
        let mut y = vec![0.0; self.program.vars.len()];
        for (i, g) in inst.generators.iter().enumerate() {
            let mut prev = if g.initial_on { 1.0 } else { 0.0 };
            for t in 0..inst.periods {
                let x = on[i][t].round();
                y[l.on[i][t]] = x;
                if let Some(k) = l.startup[i][t] {
                    y[k] = (x - prev).max(0.0);
                }
                if let Some(k) = l.shutdown[i][t] {
                    y[k] = (prev - x).max(0.0);
                }
                prev = x;
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;
    use crate::mip::solve_milp;

    #[test]
    fn scarf_counterpart_values() {
        let inst = builtin_instance("scarf").unwrap();
        let det = solve_milp(&build_robust_primal(&inst.deterministic()).unwrap()).unwrap();
        assert!((det.objective - 260.0).abs() < 1e-6);
        let aro = solve_milp(&build_robust_primal(&inst).unwrap()).unwrap();
        assert!((aro.objective - 378.0).abs() < 1e-6);
    }

    #[test]
    fn l2_is_rejected() {
        let inst = builtin_instance("scarf").unwrap().with_norm(NormOrder::Two);
        assert!(matches!(
            build_robust_primal(&inst),
            Err(Error::UnsupportedNorm(NormOrder::Two))
        ));
    }

    #[test]
    fn zero_budgets_omit_policy() {
        let inst = builtin_instance("scarf").unwrap().deterministic();
        let m = build_uc_model(&inst).unwrap();
        assert!(m.layout.v[0].iter().flatten().all(Option::is_none));
        assert!(m.layout.z[0].iter().flatten().all(Option::is_none));
    }
}
