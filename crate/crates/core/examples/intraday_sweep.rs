//! Next-day dispatch against realized residual load: the optimal intraday
//! cost stays under the adaptive part of the day-ahead cost.
//!
//! `cargo run --example intraday_sweep > sweep.csv`

use aro_pricing::instance::builtin_instance;
use aro_pricing::intraday::{realization_sweep, sweep_csv};
use aro_pricing::robust::solve_aro;

fn main() -> aro_pricing::Result<()> {
    let inst = builtin_instance("scarf")?;
    let (sol, _) = solve_aro(&inst)?;
    let points = realization_sweep(&inst, &sol, 21)?;
    print!("{}", sweep_csv(&points));
    Ok(())
}
