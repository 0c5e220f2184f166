use aro_pricing::norms::{dot, dual_order, max_linear_over_ball, norm, NormOrder};
use proptest::collection::vec;
use proptest::prelude::*;

fn order() -> impl Strategy<Value = NormOrder> {
    prop_oneof![
        Just(NormOrder::One),
        Just(NormOrder::Two),
        Just(NormOrder::Infinity)
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn holder_inequality(pair in (1usize..8).prop_flat_map(|n| (vec(-50.0f64..50.0, n), vec(-50.0f64..50.0, n))), o in order()) {
        let (c, x) = pair;
        let bound = norm(&c, dual_order(o)) * norm(&x, o);
        prop_assert!(dot(&c, &x).abs() <= bound + 1e-9 * (1.0 + bound));
    }

    #[test]
    fn support_function_is_the_dual_norm(c in vec(-50.0f64..50.0, 1..8), radius in 0.0f64..30.0, o in order()) {
        let (value, arg) = max_linear_over_ball(&c, o, radius);
        prop_assert!(close(value, radius * norm(&c, dual_order(o))));
        prop_assert!(close(dot(&c, &arg), value));
        prop_assert!(norm(&arg, o) <= radius * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn positive_homogeneity(x in vec(-50.0f64..50.0, 1..8), k in 0.0f64..20.0, o in order()) {
        let scaled: Vec<f64> = x.iter().map(|v| k * v).collect();
        prop_assert!(close(norm(&scaled, o), k * norm(&x, o)));
    }

    #[test]
    fn triangle_inequality(pair in (1usize..8).prop_flat_map(|n| (vec(-50.0f64..50.0, n), vec(-50.0f64..50.0, n))), o in order()) {
        let (a, b) = pair;
        let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        prop_assert!(norm(&sum, o) <= norm(&a, o) + norm(&b, o) + 1e-9);
    }
}

#[test]
fn duality_is_an_involution() {
    for o in [NormOrder::One, NormOrder::Two, NormOrder::Infinity] {
        assert_eq!(dual_order(dual_order(o)), o);
    }
    assert_eq!(dual_order(NormOrder::One), NormOrder::Infinity);
    assert_eq!(dual_order(NormOrder::Two), NormOrder::Two);
}
