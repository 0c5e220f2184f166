//! The simplex engine on its own: duals, a complementary-slackness audit
//! and the range of optimal shadow prices at a degenerate point.
//!
//! `cargo run --example lp_duals`

use aro_pricing::lp::{
    check_complementary_slackness, dual_price_range, solve_lp, LpProblem, Relation, Sense,
};

fn main() -> aro_pricing::Result<()> {
    // two suppliers at 2 and 3 per MW, 5 MW each, serving a 5 MW load
    let mut p = LpProblem::new(Sense::Minimize);
    let a = p.add_var(2.0, 0.0, 5.0);
    let b = p.add_var(3.0, 0.0, 5.0);
    let bal = p.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 5.0);
    let s = solve_lp(&p)?;
    println!(
        "x {:?}  cost {:.6}  balance dual {:.6}",
        s.x, s.objective, s.duals[bal]
    );
    let audit = check_complementary_slackness(&p, &s)?;
    println!("slackness max violation {:.3e}", audit.max_violation);
    if let Some((lo, hi)) = dual_price_range(&p, bal)? {
        println!("optimal balance prices range over [{lo:?}, {hi:?}]");
    }
    Ok(())
}
