//! Instance generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use aro_pricing::instance::{DemandNode, GeneratorSpec, UCInstance, UncertaintySpec};
use aro_pricing::intraday::self_schedule_profit;
use aro_pricing::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use aro_pricing::norms::NormOrder;
use aro_pricing::pricing::{
    adaptive_uniform_day_ahead, pay_as_bid_day_ahead, worst_case_settlement,
};
use aro_pricing::robust::{
    build_robust_dual, solve_aro, worst_case_realization, AroSolution, DualCertificate,
};
use aro_pricing::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERTEX_TOL: f64 = 1e-9;

fn quarter(v: f64) -> f64 {
    (v * 4.0).round() / 4.0
}

/// A single-period instance with 3–8 generators, 2–5 nodes and random
/// costs, capacities and budgets. Odd seeds use L∞ sets.
pub fn random_instance(seed: u64) -> UCInstance {
    random_sized(seed, 3..=8)
}

pub fn random_sized(seed: u64, gens: std::ops::RangeInclusive<usize>) -> UCInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(gens);
    let m = rng.gen_range(2..=5);
    let order = if seed.is_multiple_of(2) {
        NormOrder::One
    } else {
        NormOrder::Infinity
    };
    let demand_nodes: Vec<DemandNode> = (0..m)
        .map(|j| DemandNode {
            id: format!("N{}", j + 1),
            expected_load: vec![quarter(rng.gen_range(1.0..8.0))],
        })
        .collect();
    let load: f64 = demand_nodes.iter().map(|d| d.expected_load[0]).sum();
    let spread = if order == NormOrder::One {
        1.0
    } else {
        m as f64
    };
    let gamma = if rng.gen_bool(0.15) {
        0.0
    } else {
        quarter(rng.gen_range(0.0..load / spread))
    };
    let delta = if rng.gen_bool(0.4) {
        0.0
    } else {
        quarter(rng.gen_range(0.0..1.5))
    };
    let generators = (0..n)
        .map(|i| {
            let mut g = GeneratorSpec::simple(
                &format!("G{}", i + 1),
                quarter(rng.gen_range(0.0..60.0)),
                quarter(rng.gen_range(1.0..10.0)),
                quarter(rng.gen_range(4.0..25.0)),
            );
            if rng.gen_bool(0.2) {
                g.cap_min = quarter(rng.gen_range(0.0..2.0));
            }
            g
        })
        .collect();
    UCInstance {
        generators,
        demand_nodes,
        periods: 1,
        uncertainty: UncertaintySpec {
            norm_order: order,
            gamma_q: vec![gamma],
            delta_p: vec![delta],
        },
    }
}

pub type Solved = (UCInstance, AroSolution, DualCertificate);

/// The first `count` robustly feasible instances from consecutive seeds.
pub fn feasible_random_instances(count: usize, first_seed: u64) -> Vec<Solved> {
    let mut out = Vec::with_capacity(count);
    let mut seed = first_seed;
    while out.len() < count {
        assert!(
            seed < first_seed + 20 * count as u64,
            "too few feasible draws"
        );
        let inst = random_instance(seed);
        seed += 1;
        match solve_aro(&inst) {
            Ok((sol, cert)) => out.push((inst, sol, cert)),
            Err(Error::Infeasible(_)) => continue,
            Err(e) => panic!("seed {}: {e}", seed - 1),
        }
    }
    out
}

/// Rows `a·x (rel) b`, plus finite variable bounds.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Polytope {
    pub fn from_lp(lp: &LpProblem) -> Self {
        let n = lp.cost.len();
        let rows = lp
            .rows
            .iter()
            .map(|r| {
                let mut a = vec![0.0; n];
                for &(k, v) in &r.coeffs {
                    a[k] += v;
                }
                (a, r.relation, r.rhs)
            })
            .collect();
        Polytope {
            rows,
            lower: lp.lower.clone(),
            upper: lp.upper.clone(),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        let n = self.lower.len();
        (0..n).all(|k| x[k] >= self.lower[k] - VERTEX_TOL && x[k] <= self.upper[k] + VERTEX_TOL)
            && self.rows.iter().all(|(a, rel, b)| {
                let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                let scale = 1.0 + b.abs();
                match rel {
                    Relation::Le => lhs <= b + VERTEX_TOL * scale,
                    Relation::Ge => lhs >= b - VERTEX_TOL * scale,
                    Relation::Eq => (lhs - b).abs() <= VERTEX_TOL * scale,
                }
            })
    }

    /// Every vertex, by solving each square subsystem of active constraints.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.lower.len();
        let mut planes: Vec<(Vec<f64>, f64)> =
            self.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            planes.push((e.clone(), self.lower[k]));
            planes.push((e, self.upper[k]));
        }
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut pick = Vec::with_capacity(n);
        self.subsets(&planes, 0, &mut pick, &mut out);
        out
    }

    fn subsets(
        &self,
        planes: &[(Vec<f64>, f64)],
        from: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<Vec<f64>>,
    ) {
        let n = self.lower.len();
        if pick.len() == n {
            let a = DMatrix::from_fn(n, n, |r, c| planes[pick[r]].0[c]);
            let b = DVector::from_fn(n, |r, _| planes[pick[r]].1);
            if a.determinant().abs() < 1e-10 {
                return;
            }
            if let Some(x) = a.lu().solve(&b) {
                let x: Vec<f64> = x.iter().copied().collect();
                if self.contains(&x)
                    && !out
                        .iter()
                        .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9))
                {
                    out.push(x);
                }
            }
            return;
        }
        for k in from..planes.len() {
            pick.push(k);
            self.subsets(planes, k + 1, pick, out);
            pick.pop();
        }
    }
}

/// Optimum of a bounded LP by enumerating its vertices; `None` if infeasible.
pub fn lp_by_vertices(lp: &LpProblem) -> Option<f64> {
    let values = Polytope::from_lp(lp)
        .vertices()
        .into_iter()
        .map(|x| lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>());
    match lp.sense {
        Sense::Minimize => values.reduce(f64::min),
        Sense::Maximize => values.reduce(f64::max),
    }
}

/// A small LP with every variable boxed, so it is never unbounded. Rows
/// are built around an integer point of the box; about one in eight is
/// then pushed past it, which may make the LP infeasible.
pub fn random_boxed_lp(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.gen_range(2..=4);
    let sense = if rng.gen_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let mut lp = LpProblem::new(sense);
    let mut anchor = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = rng.gen_range(-5..=2);
        let hi = lo + rng.gen_range(1..=8);
        anchor.push(rng.gen_range(lo..=hi) as f64);
        lp.add_var(rng.gen_range(-6..=6) as f64, lo as f64, hi as f64);
    }
    for _ in 0..rng.gen_range(1..=5) {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|k| {
                let a = rng.gen_range(-4..=4);
                (a != 0).then_some((k, a as f64))
            })
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let at: f64 = coeffs.iter().map(|&(k, a)| a * anchor[k]).sum();
        let slack = rng.gen_range(0..=4) as f64;
        let push = if rng.gen_ratio(1, 8) {
            rng.gen_range(5..=20) as f64
        } else {
            0.0
        };
        let (rel, rhs) = match rng.gen_range(0..5) {
            0 => (Relation::Eq, at + push),
            1 | 2 => (Relation::Ge, at - slack + push),
            _ => (Relation::Le, at + slack - push),
        };
        lp.add_row(coeffs, rel, rhs);
    }
    lp
}

/// Best objective over every commitment pattern of a single-period
/// instance, each pattern priced by the explicit dual at that commitment.
pub fn commitment_enumeration(inst: &UCInstance) -> Option<f64> {
    assert_eq!(inst.periods, 1);
    let n = inst.n_gens();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let on: Vec<Vec<f64>> = (0..n).map(|i| vec![((mask >> i) & 1) as f64]).collect();
        let dual = build_robust_dual(inst, &on).expect("dual builds");
        let s = solve_lp(&dual).expect("dual solves");
        if s.status == LpStatus::Optimal {
            best = Some(best.map_or(s.objective, |b: f64| b.min(s.objective)));
        }
    }
    best
}

/// Lagrangian of the deterministic energy balance, evaluated from the
/// vertices of every on/off sequence's dispatch polytope.
pub struct LagrangianOracle {
    energy: Vec<f64>,
    /// Per generator: feasible sequences as (fixed cost, dispatch vertices).
    sequences: Vec<Vec<(f64, Vec<Vec<f64>>)>>,
    load: Vec<f64>,
}

impl LagrangianOracle {
    pub fn new(inst: &UCInstance) -> Self {
        let tt = inst.periods;
        let sequences = inst
            .generators
            .iter()
            .map(|g| {
                (0u32..(1 << tt))
                    .filter_map(|mask| {
                        let x: Vec<bool> = (0..tt).map(|t| (mask >> t) & 1 == 1).collect();
                        runs_respect_minimums(g, &x)
                            .then(|| (fixed_cost(g, &x), dispatch_polytope(g, &x).vertices()))
                    })
                    .filter(|(_, v)| !v.is_empty())
                    .collect()
            })
            .collect();
        LagrangianOracle {
            energy: inst.generators.iter().map(|g| g.energy_cost).collect(),
            sequences,
            load: (0..tt).map(|t| inst.total_load(t)).collect(),
        }
    }

    pub fn value(&self, pi: &[f64]) -> f64 {
        let mut total: f64 = pi.iter().zip(&self.load).map(|(p, q)| p * q).sum();
        for (i, seqs) in self.sequences.iter().enumerate() {
            let best = seqs
                .iter()
                .map(|(fixed, verts)| {
                    let dispatch = verts
                        .iter()
                        .map(|p| {
                            p.iter()
                                .zip(pi)
                                .map(|(pt, pr)| (self.energy[i] - pr) * pt)
                                .sum::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min);
                    fixed + dispatch
                })
                .fold(f64::INFINITY, f64::min);
            total += best;
        }
        total
    }
}

fn fixed_cost(g: &GeneratorSpec, x: &[bool]) -> f64 {
    let mut prev = g.initial_on;
    let mut cost = 0.0;
    for &on in x {
        if on {
            cost += g.commit_cost + g.no_load_cost;
            if !prev {
                cost += g.startup_cost;
            }
        }
        prev = on;
    }
    cost
}

/// Interior runs must last at least the minimum up or down time; a run
/// continuing the initial state or cut by the horizon is exempt.
fn runs_respect_minimums(g: &GeneratorSpec, x: &[bool]) -> bool {
    let mut start = 0;
    while start < x.len() {
        let mut end = start;
        while end < x.len() && x[end] == x[start] {
            end += 1;
        }
        let continues_initial = start == 0 && x[0] == g.initial_on;
        let cut = end == x.len();
        let need = if x[start] { g.min_up } else { g.min_down } as usize;
        if !continues_initial && !cut && end - start < need {
            return false;
        }
        start = end;
    }
    true
}

fn dispatch_polytope(g: &GeneratorSpec, x: &[bool]) -> Polytope {
    let tt = x.len();
    let on = |t: usize| if x[t] { 1.0 } else { 0.0 };
    let started = |t: usize| {
        let prev = if t == 0 { g.initial_on } else { x[t - 1] };
        if x[t] && !prev {
            1.0
        } else {
            0.0
        }
    };
    let stopped = |t: usize| if t > 0 && x[t - 1] && !x[t] { 1.0 } else { 0.0 };
    let ramp = g.ramp_rate.unwrap_or(g.cap_max);
    let up = g.startup_rate.unwrap_or(g.cap_max);
    let down = g.shutdown_rate.unwrap_or(g.cap_max);
    let unit = |t: usize, s: f64| {
        let mut a = vec![0.0; tt];
        a[t] = s;
        a
    };
    let mut rows = Vec::new();
    if g.has_ramp_limits() && tt > 1 {
        if !g.initial_on {
            rows.push((unit(0, 1.0), Relation::Le, up * started(0)));
        }
        for t in 1..tt {
            let mut a = unit(t, 1.0);
            a[t - 1] = -1.0;
            rows.push((a.clone(), Relation::Le, ramp * on(t - 1) + up * started(t)));
            let b: Vec<f64> = a.iter().map(|v| -v).collect();
            rows.push((b, Relation::Le, ramp * on(t) + down * stopped(t)));
        }
    }
    Polytope {
        rows,
        lower: (0..tt).map(|t| g.cap_min * on(t)).collect(),
        upper: (0..tt).map(|t| g.cap_max * on(t)).collect(),
    }
}

/// Deterministic single-period optimum by enumerating commitments and
/// dispatching each one in merit order above the minimum outputs.
pub fn merit_order_optimum(inst: &UCInstance) -> Option<f64> {
    assert_eq!(inst.periods, 1);
    let gens = &inst.generators;
    let load = inst.total_load(0);
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| gens[a].energy_cost.total_cmp(&gens[b].energy_cost));
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << gens.len()) {
        let on = |i: usize| (mask >> i) & 1 == 1;
        let floor: f64 = (0..gens.len())
            .filter(|&i| on(i))
            .map(|i| gens[i].cap_min)
            .sum();
        let ceil: f64 = (0..gens.len())
            .filter(|&i| on(i))
            .map(|i| gens[i].cap_max)
            .sum();
        if load < floor - 1e-12 || load > ceil + 1e-12 {
            continue;
        }
        let mut cost: f64 = (0..gens.len())
            .filter(|&i| on(i))
            .map(|i| {
                gens[i].commit_cost + gens[i].no_load_cost + gens[i].energy_cost * gens[i].cap_min
            })
            .sum();
        let mut rest = load - floor;
        for &i in order.iter().filter(|&&i| on(i)) {
            let take = rest.min(gens[i].cap_max - gens[i].cap_min).max(0.0);
            cost += take * gens[i].energy_cost;
            rest -= take;
        }
        best = Some(best.map_or(cost, |b: f64| b.min(cost)));
    }
    best
}

/// Vertices of the L1 or L∞ ball of `radius` in `n` dimensions.
pub fn ball_vertices(n: usize, order: NormOrder, radius: f64) -> Vec<Vec<f64>> {
    match order {
        NormOrder::One => (0..2 * n)
            .map(|k| {
                let mut v = vec![0.0; n];
                v[k / 2] = if k % 2 == 0 { radius } else { -radius };
                v
            })
            .collect(),
        NormOrder::Infinity => (0u32..(1 << n))
            .map(|mask| {
                (0..n)
                    .map(|j| {
                        if (mask >> j) & 1 == 1 {
                            radius
                        } else {
                            -radius
                        }
                    })
                    .collect()
            })
            .collect(),
        NormOrder::Two => panic!("no finite vertex set"),
    }
}

/// Worst dispatch cost of the committed policy, maximized over the
/// vertices of both uncertainty sets.
pub fn worst_dispatch_cost(inst: &UCInstance, sol: &AroSolution) -> f64 {
    let order = inst.norm_order();
    let (n, m) = (inst.n_gens(), inst.n_nodes());
    let mut total = 0.0;
    for t in 0..inst.periods {
        let zeros_r = vec![0.0; n];
        let zeros_d = vec![0.0; m];
        let cost = |d: &[f64], r: &[f64]| -> f64 {
            (0..n)
                .map(|i| inst.generators[i].energy_cost * sol.policy.dispatch(t, i, d, r))
                .sum()
        };
        let base = cost(&zeros_d, &zeros_r);
        let load = ball_vertices(m, order, inst.gamma(t))
            .iter()
            .map(|d| cost(d, &zeros_r) - base)
            .fold(f64::NEG_INFINITY, f64::max);
        let cap = ball_vertices(n, order, inst.delta(t))
            .iter()
            .map(|r| cost(&zeros_d, r) - base)
            .fold(f64::NEG_INFINITY, f64::max);
        total += base + load + cap;
    }
    total
}

fn commitment_bid(inst: &UCInstance, sol: &AroSolution, i: usize) -> f64 {
    let g = &inst.generators[i];
    (0..inst.periods)
        .map(|t| {
            sol.commitments.on[i][t] * (g.commit_cost + g.no_load_cost)
                + sol.commitments.startup[i][t] * g.startup_cost
        })
        .sum()
}

/// Largest per-generator gap between pay-as-bid and adaptive uniform totals.
pub fn theorem1_deviation(inst: &UCInstance, sol: &AroSolution, cert: &DualCertificate) -> f64 {
    let bid = pay_as_bid_day_ahead(sol, inst);
    let uni = adaptive_uniform_day_ahead(sol, cert, inst);
    bid.totals()
        .iter()
        .zip(uni.totals())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Largest of `|f_i − g_i|`, `|Σf − ξ*|` and the gap between `Σf` and the
/// total cost recomputed at a worst-case realization. Ties among worst
/// cases move cost between generators, so only the sum is recomputed.
pub fn theorem2_deviation(inst: &UCInstance, sol: &AroSolution, cert: &DualCertificate) -> f64 {
    let Ok((f, g)) = worst_case_settlement(sol, cert, inst) else {
        return f64::INFINITY;
    };
    let wc = worst_case_realization(sol, inst);
    let direct: f64 = (0..inst.n_gens())
        .map(|i| {
            let c = inst.generators[i].energy_cost;
            commitment_bid(inst, sol, i)
                + (0..inst.periods)
                    .map(|t| {
                        c * sol.policy.dispatch(
                            t,
                            i,
                            &wc.load_residual[t],
                            &wc.capacity_residual[t],
                        )
                    })
                    .sum::<f64>()
        })
        .sum();
    f.rows
        .iter()
        .zip(&g.rows)
        .map(|(a, b)| (a.total - b.total).abs())
        .fold((f.grand_total - sol.objective).abs(), f64::max)
        .max((f.grand_total - direct).abs())
}

/// Largest of every decentralized profit and `|centralized profit|`.
pub fn theorem3_deviation(inst: &UCInstance, sol: &AroSolution, cert: &DualCertificate) -> f64 {
    inst.generators
        .iter()
        .map(|g| match self_schedule_profit(inst, cert, sol, &g.id) {
            Ok(r) => r.decentralized.max(r.centralized.abs()),
            Err(_) => f64::INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest violation among the column-sum laws, load balance, relative
/// strong duality, dual feasibility and the optimality identities.
pub fn structural_deviation(inst: &UCInstance, sol: &AroSolution, cert: &DualCertificate) -> f64 {
    let (n, m) = (inst.n_gens(), inst.n_nodes());
    let mut dev: f64 = 0.0;
    for t in 0..inst.periods {
        if inst.gamma(t) > 0.0 {
            for j in 0..m {
                dev = dev.max(((0..n).map(|i| sol.policy.v[t][i][j]).sum::<f64>() - 1.0).abs());
            }
        }
        if inst.delta(t) > 0.0 {
            for k in 0..n {
                dev = dev.max((0..n).map(|i| sol.policy.z[t][i][k]).sum::<f64>().abs());
            }
        }
        dev = dev.max(((0..n).map(|i| sol.policy.u[i][t]).sum::<f64>() - inst.total_load(t)).abs());
    }
    let duality = (sol.objective - cert.dual_objective).abs() / (1.0 + sol.objective.abs());
    dev.max(duality)
        .max(sol.phase2.dual_violation(&cert.multipliers))
        .max(sol.phase2.identity_violation(&sol.y, &cert.multipliers))
        .max((cert.nu - 1.0).abs())
}
