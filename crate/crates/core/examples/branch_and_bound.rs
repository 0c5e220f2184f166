//! Best-bound branch and bound on a small knapsack, with the search trace.
//!
//! `cargo run --example branch_and_bound`

use aro_pricing::lp::{LpProblem, Relation, Sense};
use aro_pricing::mip::{solve_milp_traced, MipProblem, MipTrace, NODE_LIMIT};

fn main() -> aro_pricing::Result<()> {
    let values = [10.0, 13.0, 7.0, 8.0, 4.0];
    let weights = [5.0, 7.0, 4.0, 4.0, 3.0];
    let mut lp = LpProblem::new(Sense::Maximize);
    let x: Vec<usize> = values.iter().map(|v| lp.add_var(*v, 0.0, 1.0)).collect();
    lp.add_row(
        x.iter().zip(weights).map(|(&j, w)| (j, w)).collect(),
        Relation::Le,
        12.0,
    );
    let mut trace = MipTrace::default();
    let s = solve_milp_traced(
        &MipProblem { lp, binaries: x },
        NODE_LIMIT,
        Some(&mut trace),
    )?;
    println!(
        "picked {:?}  value {:.6}  nodes {}",
        s.x, s.objective, s.nodes
    );
    println!("integral leaves {:?}", trace.integral);
    Ok(())
}
