//! The full invariant suite behind `aro verify`, on every builtin.
//!
//! `cargo run --release --example verify_suite`

use aro_pricing::instance::{builtin_instance, BUILTIN_NAMES};
use aro_pricing::verify::{verify_instance, Status};

fn main() -> aro_pricing::Result<()> {
    for name in BUILTIN_NAMES {
        let report = verify_instance(&builtin_instance(name)?, 0)?;
        println!(
            "{name}: {}",
            if report.passed() {
                "all checks pass"
            } else {
                "failures"
            }
        );
        for c in report.checks.iter().filter(|c| c.status != Status::Pass) {
            println!("  {:?} {}: {}", c.status, c.name, c.detail);
        }
    }
    Ok(())
}
