//! Each generator re-optimizes its own schedule at the robust prices. At
//! the certified prices nobody gains; raising the balance price breaks it.
//!
//! `cargo run --example self_scheduling`

use aro_pricing::instance::builtin_instance;
use aro_pricing::intraday::{decentralized_profit, self_schedule_profit, shift_balance_price};
use aro_pricing::robust::solve_aro;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?;
    let (sol, cert) = solve_aro(&inst)?;
    let high = shift_balance_price(&cert, &sol, 1.0);
    println!("generator  centralized  decentralized  at_mu_plus_1");
    for g in &inst.generators {
        let r = decentralized_profit(&inst, &cert, &sol, &g.id)?;
        let p = self_schedule_profit(&inst, &high, &sol, &g.id)?;
        println!(
            "{:<9}  {:>11.6}  {:>13.6}  {:>12.6}",
            g.id, r.centralized, r.decentralized, p.decentralized
        );
    }
    Ok(())
}
