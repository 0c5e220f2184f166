//! Three-period commitment with start-up costs, ramp limits and per-period
//! budgets; deterministic and robust prices side by side.
//!
//! `cargo run --example multiperiod`

use aro_pricing::fixed6;
use aro_pricing::instance::builtin_instance;
use aro_pricing::pricing::{adaptive_uniform_day_ahead, pay_as_bid_day_ahead};
use aro_pricing::robust::solve_aro;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("chen-multiperiod")?;
    for (label, case) in [
        ("deterministic", inst.deterministic()),
        ("robust", inst.clone()),
    ] {
        let (sol, cert) = solve_aro(&case)?;
        let prices: Vec<String> = cert.mu.iter().map(|m| fixed6(*m)).collect();
        println!(
            "{label}: objective {}  prices [{}]",
            fixed6(sol.objective),
            prices.join(", ")
        );
        for (i, g) in case.generators.iter().enumerate() {
            let u: Vec<String> = sol.policy.u[i].iter().map(|x| fixed6(*x)).collect();
            println!(
                "  {} on {:?} u [{}]",
                g.id,
                sol.commitments.on[i],
                u.join(", ")
            );
        }
        print!("{}", pay_as_bid_day_ahead(&sol, &case).to_csv());
        print!(
            "{}",
            adaptive_uniform_day_ahead(&sol, &cert, &case).to_csv()
        );
    }
    Ok(())
}
