//! Adaptive robust commitment with a budget of 20 MW on the nodal load
//! residuals: policy, prices, and both day-ahead settlements.
//!
//! `cargo run --example scarf_adaptive`

use aro_pricing::instance::builtin_instance;
use aro_pricing::pricing::{
    adaptive_uniform_day_ahead, pay_as_bid_day_ahead, worst_case_settlement,
};
use aro_pricing::robust::{solve_aro, worst_case_realization};

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?;
    let (sol, cert) = solve_aro(&inst)?;
    println!(
        "objective {:.6}  mu {:.6}  nu {:.6}",
        sol.objective, cert.mu[0], cert.nu
    );
    for (i, g) in inst.generators.iter().enumerate() {
        let v: Vec<String> = sol.policy.v[0][i]
            .iter()
            .map(|x| format!("{x:.4}"))
            .collect();
        println!(
            "  {} u {:>8.4}  V [{}]",
            g.id,
            sol.policy.u[i][0],
            v.join(", ")
        );
    }

    let bid = pay_as_bid_day_ahead(&sol, &inst);
    let uni = adaptive_uniform_day_ahead(&sol, &cert, &inst);
    print!("{}{}", bid.to_csv(), uni.to_csv());

    // at the worst case the as-bid cost and the price-based payment coincide
    let (f, g) = worst_case_settlement(&sol, &cert, &inst)?;
    println!(
        "worst case d* {:?}",
        worst_case_realization(&sol, &inst).load_residual[0]
    );
    println!("sum f {:.6}  sum g {:.6}", f.grand_total, g.grand_total);
    Ok(())
}
