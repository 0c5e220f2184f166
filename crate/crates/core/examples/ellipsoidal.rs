//! Ellipsoidal load uncertainty solved by supporting-hyperplane cuts, with
//! the result checked against sampled scenarios.
//!
//! `cargo run --release --example ellipsoidal`

use aro_pricing::instance::builtin_instance;
use aro_pricing::norms::NormOrder;
use aro_pricing::robust::ellipsoidal_outer_solve;
use aro_pricing::verify::sample_ball;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?
        .with_norm(NormOrder::Two)
        .with_budgets(&[10.0], &[0.0])?;
    let (sol, cert) = ellipsoidal_outer_solve(&inst, 1e-6)?;
    println!(
        "objective {:.6}  mu {:.6}  approximate {}",
        sol.objective, cert.mu[0], cert.approximate
    );

    // largest sampled dispatch cost under the policy never exceeds eta
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let d = sample_ball(&mut rng, inst.n_nodes(), NormOrder::Two, 10.0);
        let cost: f64 = inst
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| g.energy_cost * sol.policy.dispatch(0, i, &d, &[0.0; 8]))
            .sum();
        worst = worst.max(cost);
    }
    println!(
        "sampled worst dispatch cost {worst:.6} <= eta {:.6}",
        sol.eta
    );
    Ok(())
}
