//! Deterministic unit commitment on the eight-unit example and its marginal
//! price settlement.
//!
//! `cargo run --example scarf_deterministic`

use aro_pricing::instance::builtin_instance;
use aro_pricing::pricing::deterministic_marginal;
use aro_pricing::robust::solve_aro;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?.deterministic();
    let (sol, cert) = solve_aro(&inst)?;
    println!(
        "objective {:.6}  balance price {:.6}",
        sol.objective, cert.mu[0]
    );
    for (i, g) in inst.generators.iter().enumerate() {
        println!(
            "  {} on {} output {:.6}",
            g.id, sol.commitments.on[i][0], sol.policy.u[i][0]
        );
    }
    print!("{}", deterministic_marginal(&inst)?.to_csv());
    Ok(())
}
