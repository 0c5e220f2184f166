mod common;

use aro_pricing::instance::builtin_instance;
use aro_pricing::intraday::intraday_dispatch_realized;
use aro_pricing::norms::norm;
use aro_pricing::robust::{solve_aro, worst_case_realization};
use aro_pricing::verify::sample_ball;
use aro_pricing::Error;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn settlement_theorems_hold(seed in 0u64..1_000_000) {
        let inst = random_instance(seed);
        let (sol, cert) = match solve_aro(&inst) {
            Ok(x) => x,
            Err(Error::Infeasible(_)) => return Err(TestCaseError::reject("infeasible draw")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(theorem1_deviation(&inst, &sol, &cert) <= TOL);
        prop_assert!(theorem2_deviation(&inst, &sol, &cert) <= TOL);
        prop_assert!(theorem3_deviation(&inst, &sol, &cert) <= TOL);
        prop_assert!(structural_deviation(&inst, &sol, &cert) <= TOL);
    }

    #[test]
    fn robust_objective_brackets(seed in 0u64..1_000_000) {
        let inst = random_instance(seed);
        let Ok((sol, _)) = solve_aro(&inst) else {
            return Err(TestCaseError::reject("infeasible draw"));
        };
        let det = merit_order_optimum(&inst).expect("robustly feasible implies feasible");
        prop_assert!(sol.objective >= det - TOL);
        let zero = solve_aro(&inst.deterministic()).unwrap().0;
        prop_assert!((zero.objective - det).abs() <= TOL, "{} vs {det}", zero.objective);
        // the epigraph is tight: η is the policy's worst dispatch cost
        prop_assert!((sol.eta - worst_dispatch_cost(&inst, &sol)).abs() <= TOL);
        prop_assert!((sol.objective - sol.eta - (0..inst.n_gens())
            .map(|i| sol.commitments.on[i][0] * inst.generators[i].commit_cost)
            .sum::<f64>()).abs() <= TOL);
    }

    #[test]
    fn realized_dispatch_stays_under_the_adaptive_bound(seed in 0u64..1_000_000) {
        let inst = random_instance(seed);
        let Ok((sol, _)) = solve_aro(&inst) else {
            return Err(TestCaseError::reject("infeasible draw"));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = inst.norm_order();
        for _ in 0..50 {
            let d: Vec<f64> = sample_ball(&mut rng, inst.n_nodes(), order, inst.gamma(0)).iter().map(|v| v.abs()).collect();
            let r = sample_ball(&mut rng, inst.n_gens(), order, inst.delta(0));
            prop_assert!(norm(&d, order) <= inst.gamma(0) + 1e-9);
            // the policy itself is feasible at (d, r)
            let mut total = 0.0;
            for (i, g) in inst.generators.iter().enumerate() {
                let p = sol.policy.dispatch(0, i, &d, &r);
                prop_assert!(p >= -TOL && p <= (g.cap_max + r[i]) * sol.commitments.on[i][0] + TOL);
                total += p;
            }
            prop_assert!((total - inst.total_load(0) - d.iter().sum::<f64>()).abs() <= TOL);
            // the policy's increments are a feasible dispatch only when no
            // unit backs down as load rises
            if sol.policy.v[0].iter().flatten().all(|&v| v >= -1e-9) {
                let res = intraday_dispatch_realized(&inst, &sol, 0, &d, &vec![0.0; inst.n_gens()]).unwrap();
                prop_assert!(res.cost <= res.bound + TOL, "cost {} bound {}", res.cost, res.bound);
            }
        }
    }
}

#[test]
fn worst_case_realization_lies_in_the_sets() {
    for name in ["scarf", "scarf-capacity", "chen-multiperiod"] {
        let inst = builtin_instance(name).unwrap();
        let (sol, _) = solve_aro(&inst).unwrap();
        let wc = worst_case_realization(&sol, &inst);
        assert!(wc.in_sets(&inst, 1e-9), "{name}");
        assert!(
            (sol.eta - worst_dispatch_cost(&inst, &sol)).abs() <= TOL,
            "{name}"
        );
    }
}

#[test]
fn builtin_suite_satisfies_every_law() {
    for name in ["scarf", "scarf-capacity", "chen-multiperiod"] {
        let inst = builtin_instance(name).unwrap();
        let (sol, cert) = solve_aro(&inst).unwrap();
        assert!(theorem1_deviation(&inst, &sol, &cert) <= TOL, "{name}");
        assert!(theorem2_deviation(&inst, &sol, &cert) <= TOL, "{name}");
        assert!(theorem3_deviation(&inst, &sol, &cert) <= TOL, "{name}");
        assert!(structural_deviation(&inst, &sol, &cert) <= TOL, "{name}");
    }
}
