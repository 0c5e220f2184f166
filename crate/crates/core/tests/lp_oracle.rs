mod common;

use aro_pricing::lp::{
    check_complementary_slackness, farkas_margin, solve_lp, LpProblem, LpStatus, Relation, Sense,
};
use common::{lp_by_vertices, random_boxed_lp};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol(z: f64) -> f64 {
    1e-8 * (1.0 + z.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boxed_lps_match_vertex_enumeration(seed in any::<u64>()) {
        let lp = random_boxed_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = solve_lp(&lp).unwrap();
        match lp_by_vertices(&lp) {
            None => {
                prop_assert_eq!(s.status, LpStatus::Infeasible);
                let y = s.certificate.as_ref().expect("Farkas certificate");
                prop_assert!(farkas_margin(&lp, y) > 0.0);
            }
            Some(z) => {
                prop_assert_eq!(s.status, LpStatus::Optimal);
                prop_assert!((s.objective - z).abs() <= tol(z), "simplex {} vertices {}", s.objective, z);
                prop_assert!(lp.max_violation(&s.x) <= 1e-9);
                prop_assert!((s.dual_objective(&lp) - z).abs() <= tol(z));
                prop_assert!(check_complementary_slackness(&lp, &s).unwrap().pass());
            }
        }
    }

    #[test]
    fn positive_cost_scaling_scales_the_optimum(seed in any::<u64>(), k in 0.1f64..20.0) {
        let lp = random_boxed_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        let base = solve_lp(&lp).unwrap();
        prop_assume!(base.status == LpStatus::Optimal);
        let mut scaled = lp.clone();
        scaled.cost.iter_mut().for_each(|c| *c *= k);
        let s = solve_lp(&scaled).unwrap();
        prop_assert_eq!(s.status, LpStatus::Optimal);
        prop_assert!((s.objective - k * base.objective).abs() <= tol(k * base.objective));
        // duals are basis-dependent under degeneracy; their objective is not
        prop_assert!((s.dual_objective(&scaled) - k * base.objective).abs() <= tol(k * base.objective));
    }

    #[test]
    fn open_directions_are_unbounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let mut lp = LpProblem::new(Sense::Minimize);
        for k in 0..n {
            // the first variable is open upwards with negative cost
            let cost = if k == 0 { -(rng.gen_range(1..=5) as f64) } else { rng.gen_range(0..=5) as f64 };
            lp.add_var(cost, 0.0, if k == 0 { f64::INFINITY } else { 10.0 });
        }
        let coeffs = (0..n).map(|k| (k, rng.gen_range(if k == 0 { 1 } else { 0 }..=3) as f64)).collect();
        lp.add_row(coeffs, Relation::Ge, rng.gen_range(0..=10) as f64);
        let s = solve_lp(&lp).unwrap();
        prop_assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.certificate.expect("improving ray");
        let slope: f64 = lp.cost.iter().zip(&ray).map(|(c, r)| c * r).sum();
        prop_assert!(slope < 0.0);
        for (k, r) in ray.iter().enumerate() {
            prop_assert!(lp.upper[k].is_infinite() || r.abs() < 1e-12);
            prop_assert!(*r >= -1e-12);
        }
    }
}

#[test]
fn contradictory_rows_are_certified_infeasible() {
    let mut lp = LpProblem::new(Sense::Maximize);
    let a = lp.add_var(1.0, 0.0, f64::INFINITY);
    let b = lp.add_var(1.0, 0.0, f64::INFINITY);
    lp.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
    lp.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Ge, 2.0);
    let s = solve_lp(&lp).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    assert!(farkas_margin(&lp, s.certificate.as_ref().unwrap()) > 0.0);
}

#[test]
fn twenty_fixed_seed_lps_agree_with_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut optimal = 0;
    for _ in 0..20 {
        let lp = random_boxed_lp(&mut rng);
        let s = solve_lp(&lp).unwrap();
        match lp_by_vertices(&lp) {
            Some(z) => {
                optimal += 1;
                assert!((s.objective - z).abs() <= tol(z));
            }
            None => assert_eq!(s.status, LpStatus::Infeasible),
        }
    }
    assert!(optimal >= 10);
}
