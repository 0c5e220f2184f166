//! A hand-written instance document, loaded, overridden and solved.
//!
//! `cargo run --example custom_instance`

use aro_pricing::instance::{load_instance, to_document};
use aro_pricing::norms::NormOrder;
use aro_pricing::pricing::pay_as_bid_day_ahead;
use aro_pricing::robust::solve_aro;

const DOC: &str = r#"{
  "generators": [
    {"id": "base", "commit_cost": 50, "energy_cost": 1, "cap_max": 30},
    {"id": "peak", "commit_cost": 5, "energy_cost": 4, "cap_max": 25},
    {"id": "mid", "commit_cost": 20, "energy_cost": 2, "cap_max": 15}
  ],
  "demand_nodes": [
    {"id": "north", "expected_load": [12]},
    {"id": "south", "expected_load": [18]}
  ],
  "periods": 1,
  "uncertainty": {"norm": "Linf", "gamma_q": [3], "delta_p": [0]}
}"#;

fn main() -> aro_pricing::Result<()> {
    let inst = load_instance(DOC)?;
    for order in [NormOrder::Infinity, NormOrder::One] {
        let case = inst.with_norm(order);
        let (sol, cert) = solve_aro(&case)?;
        println!(
            "{order}: objective {:.6} mu {:.6}",
            sol.objective, cert.mu[0]
        );
        print!("{}", pay_as_bid_day_ahead(&sol, &case).to_csv());
    }
    println!("{}", to_document(&inst));
    Ok(())
}
