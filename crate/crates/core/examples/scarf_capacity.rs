//! Load and capacity uncertainty together: the capacity policy `Z` and the
//! uncertainty component of the uniform settlement.
//!
//! `cargo run --example scarf_capacity`

use aro_pricing::instance::builtin_instance;
use aro_pricing::pricing::adaptive_uniform_day_ahead;
use aro_pricing::robust::solve_aro;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?.with_budgets(&[20.0], &[0.5])?;
    let (sol, cert) = solve_aro(&inst)?;
    println!("objective {:.6}  mu {:.6}", sol.objective, cert.mu[0]);
    for (i, g) in inst.generators.iter().enumerate() {
        let z: Vec<String> = sol.policy.z[0][i]
            .iter()
            .map(|x| format!("{x:+.2}"))
            .collect();
        println!(
            "  {} on {} Z [{}]",
            g.id,
            sol.commitments.on[i][0],
            z.join(" ")
        );
    }
    print!(
        "{}",
        adaptive_uniform_day_ahead(&sol, &cert, &inst).to_csv()
    );
    Ok(())
}
