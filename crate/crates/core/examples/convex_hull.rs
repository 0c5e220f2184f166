//! Convex hull prices of the three-period case: the Lagrangian dual of the
//! energy balance, the duality gap and the lost-opportunity uplifts.
//!
//! `cargo run --example convex_hull`

use aro_pricing::instance::builtin_instance;
use aro_pricing::pricing::convex_hull::{convex_hull_prices, lagrangian_value};

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("chen-multiperiod")?;
    let ch = convex_hull_prices(&inst)?;
    println!("prices {:?}", ch.prices);
    println!(
        "dual {:.6}  uc {:.6}  gap {:.6}",
        ch.dual_objective, ch.uc_objective, ch.gap
    );
    print!("{}", ch.payment_table().to_csv());

    // the dual function is concave; nearby prices do no better
    for bump in [-1.0, 1.0] {
        let pi: Vec<f64> = ch.prices.iter().map(|p| p + bump).collect();
        println!("L({pi:?}) = {:.6}", lagrangian_value(&inst, &pi)?.0);
    }
    Ok(())
}
