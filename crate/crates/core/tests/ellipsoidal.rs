use aro_pricing::instance::builtin_instance;
use aro_pricing::norms::{norm, NormOrder};
use aro_pricing::robust::{ellipsoidal_outer_solve, solve_aro};
use aro_pricing::verify::sample_ball;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

#[test]
fn scarf_ball_policy_is_robust_and_bracketed() {
    let inst = builtin_instance("scarf")
        .unwrap()
        .with_norm(NormOrder::Two)
        .with_budgets(&[10.0], &[0.0])
        .unwrap();
    let (sol, cert) = ellipsoidal_outer_solve(&inst, 1e-7).unwrap();
    assert!(cert.approximate);
    let (gamma, n, m) = (inst.gamma(0), inst.n_gens(), inst.n_nodes());

    // rows in closed form: a linear function ranges over ±Γ‖c‖₂ on the ball
    for (i, g) in inst.generators.iter().enumerate() {
        let spread = gamma * norm(&sol.policy.v[0][i], NormOrder::Two);
        let u = sol.policy.u[i][0];
        assert!(u - spread >= -TOL, "unit {i} can go negative");
        assert!(
            u + spread <= g.cap_max * sol.commitments.on[i][0] + TOL,
            "unit {i} can exceed capacity"
        );
    }
    for j in 0..m {
        let col: f64 = (0..n).map(|i| sol.policy.v[0][i][j]).sum();
        assert!((col - 1.0).abs() <= TOL);
    }
    let omega: Vec<f64> = (0..m)
        .map(|j| {
            (0..n)
                .map(|i| inst.generators[i].energy_cost * sol.policy.v[0][i][j])
                .sum()
        })
        .collect();
    let base: f64 = (0..n)
        .map(|i| inst.generators[i].energy_cost * sol.policy.u[i][0])
        .sum();
    assert!((sol.eta - base - gamma * norm(&omega, NormOrder::Two)).abs() <= 1e-5);

    // sampled costs never exceed the worst case
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sampled_max = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let d = sample_ball(&mut rng, m, NormOrder::Two, gamma);
        let c: f64 = base + omega.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        sampled_max = sampled_max.max(c);
    }
    assert!(sampled_max <= sol.eta + TOL);
    assert!(sampled_max >= sol.eta - 0.1 * gamma * norm(&omega, NormOrder::Two));

    // the L1 ball sits inside the L2 ball, so its robust optimum is no larger
    let l1 = solve_aro(&inst.with_norm(NormOrder::One)).unwrap().0;
    assert!(l1.objective <= sol.objective + TOL);
    // the outer approximation bounds the objective from below
    assert!(cert.dual_objective <= sol.objective + 1e-5);
    assert!(sol.objective - cert.dual_objective <= 1e-4 * sol.objective);
    assert!((sol.objective - 408.082).abs() < 1e-3, "{}", sol.objective);
}

#[test]
fn oversized_ball_is_infeasible() {
    let inst = builtin_instance("scarf").unwrap().with_norm(NormOrder::Two);
    assert!(ellipsoidal_outer_solve(&inst, 1e-7).is_err());
}
