use approx::assert_abs_diff_eq;
use localp2::chamber::*;
use localp2::ktheory::{braid_orbit, ch_line_bundle, tensor_o1, ChernClass, CollectionTriple};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ab(a: Complex64, b: Complex64) -> ChargeParams {
    ChargeParams::new(a, b)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn central_charge_values() {
    let p = ab(c(0.3, 1.2), c(-0.7, 0.4));
    assert_eq!(central_charge(&p, ChernClass::SKYSCRAPER), c(-1.0, 0.0));
    assert_eq!(central_charge(&p, ch_line_bundle(0)), p.b);
    assert_abs_diff_eq!(
        (central_charge(&p, ch_line_bundle(-1)) - (p.b - p.a - 0.5)).norm(),
        0.0,
        epsilon = 1e-15
    );
}

#[test]
fn large_volume_parameters() {
    assert_eq!(params_from_tm(0.0, 1.0).unwrap(), ab(c(0.0, 1.0), c(0.5, 0.0)));
    assert_eq!(params_from_tm(1.0, 1.0).unwrap(), ab(c(1.0, 1.0), c(0.0, -1.0)));
    assert!(params_from_tm(0.0, 0.0).is_err());
    let p = params_from_tm(0.4, 0.7).unwrap();
    assert_abs_diff_eq!(
        (central_charge(&p, ChernClass::SKYSCRAPER) + 1.0).norm(),
        0.0,
        epsilon = 1e-15
    );
}

#[test]
fn chamber_examples() {
    let v = in_geometric_chamber(&ab(c(0.0, 2.0), c(2.0, 0.0)), 12);
    assert!(v.member);
    assert_eq!(v.failed_rule, FailedRule::None);

    let v = in_geometric_chamber(&ab(c(0.0, 1.0), c(-1.0, 0.0)), 12);
    assert!(!v.member);
    assert_eq!(v.failed_rule, FailedRule::ExceptionalSlope);
    assert_eq!(v.witness.unwrap().alpha, q(0, 1));

    let v = in_geometric_chamber(&ab(c(0.0, -1.0), c(0.0, 0.0)), 12);
    assert!(!v.member);
    assert_eq!(v.failed_rule, FailedRule::ImA);
}

#[test]
fn chamber_generic_rule() {
    // B = 1/3 is not exceptional; δ(1/3) = 5/9 bounds Re b from below
    let a = c(0.0, 1.0);
    let b_re = |m: f64| 1.0 / 18.0 - 5.0 / 9.0 + m;
    let inside = in_geometric_chamber(&ab(a, c(b_re(0.01), -1.0 / 3.0)), 10);
    assert!(inside.member, "{inside:?}");
    let outside = in_geometric_chamber(&ab(a, c(b_re(-0.01), -1.0 / 3.0)), 10);
    assert!(!outside.member);
    assert_eq!(outside.failed_rule, FailedRule::GenericSlope);
    assert_eq!(outside.witness.unwrap().alpha, q(0, 1));
    assert!(outside.nearest_exceptional_margin.is_some());
}

#[test]
fn chamber_undecided_at_boundary() {
    let v = in_geometric_chamber(&ab(c(0.0, 1.0), c(0.0, 0.0)), 12);
    assert!(!v.member);
    assert!(v.undecided);
}

#[test]
fn stab_g_examples() {
    assert!(in_stab_g(&params_from_tm(0.0, 1.0).unwrap()));
    assert!(!in_stab_g(&ab(c(0.0, 1.0), c(0.0, 0.0))));
    assert!(in_stab_g(&ab(c(0.0, 2.0), c(2.0, 0.0))));
}

#[test]
fn gamma_path_examples() {
    let p = ab(c(0.0, 1.0), c(1.0, 0.0));
    assert_abs_diff_eq!(
        (gamma_path_point(&p, 0.0, 10) - c(2.0, 0.0)).norm(),
        0.0,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(gamma_path_point(&p, 1.0, 10).im, 1.0, epsilon = 1e-15);
    assert!(in_s_ab(&p, c(10.0, 0.0), 10).unwrap());
    assert!(!in_s_ab(&p, c(1.0, 0.0), 10).unwrap());
    assert!(in_s_ab(&p, c(2.0, 0.0), 10).unwrap());
    assert!(in_s_ab(&ab(c(0.0, 0.0), c(1.0, 0.0)), c(1.0, 0.0), 10).is_err());
}

#[test]
fn s_min_examples() {
    let p = ab(c(0.0, 1.0), c(1.0, 0.0));
    let s = s_min(&p, 10, DEFAULT_GRID).unwrap();
    assert!(s.e_min <= 1.0 + 1e-12);
    assert_abs_diff_eq!(s.value, 1.0, epsilon = 1e-9);
    assert!(s.value > 0.0);
    let p = ab(c(0.0, 2.0), c(2.0, 0.0));
    let s = s_min(&p, 10, DEFAULT_GRID).unwrap();
    for k in -200..=200 {
        let t = k as f64 / 40.0;
        assert!(s.value <= gamma_path_point(&p, t, 10).norm() + 1e-12);
    }
    assert!(s_min(&ab(c(0.0, 1.0), c(-1.0, 0.0)), 10, DEFAULT_GRID).is_err());
}

#[test]
fn matrix_norm_examples() {
    assert_eq!(matrix_norm_n(&ab(c(0.0, 1.0), c(1.0, 0.0))).unwrap(), 2.0);
    assert_eq!(matrix_norm_n(&ab(c(0.0, 1.0), c(0.0, 0.0))).unwrap(), 1.0);
    assert!(matrix_norm_n(&ab(c(1.0, 0.0), c(0.0, 0.0))).is_err());
}

#[test]
fn support_constant_examples() {
    let sc = support_constant(&ab(c(0.0, 1.0), c(1.0, 0.0)), 10, DEFAULT_GRID).unwrap();
    assert_abs_diff_eq!(sc.constant, 0.5, epsilon = 1e-9);
    assert!(sc.deformation_radius < sc.constant);
    assert!(sc.constant > 0.0);
}

#[test]
fn wall_examples() {
    let w = wall_test(&ab(c(0.0, 1.0), c(-0.5, 0.0)), 10, DEFAULT_TOL).unwrap();
    assert!(w.on_wall);
    assert_eq!(w.slope.as_ref().unwrap().alpha, q(0, 1));
    assert_eq!(w.jh_sub.unwrap() + w.jh_quot.unwrap(), ChernClass::SKYSCRAPER);
    assert_eq!(w.side, Some(WallSide::Plus));
    assert_eq!(w.jh_sub, Some(ch_line_bundle(0)));

    let w = wall_test(&ab(c(0.0, 1.0), c(1.0, 0.0)), 10, DEFAULT_TOL).unwrap();
    assert!(!w.on_wall);
    assert!(wall_test(&ab(c(0.0, -1.0), c(1.0, 0.0)), 10, DEFAULT_TOL).is_err());
}

#[test]
fn wall_sides() {
    let e = ch_line_bundle(0);
    let p = ab(c(0.0, 1.0), c(-0.5, 0.0));
    assert_eq!(wall_side_towards(&p, e, c(0.0, 1.0), 1e-3), WallSide::Plus);
    assert_eq!(wall_side_towards(&p, e, c(0.0, -1.0), 1e-3), WallSide::Minus);
    let (sub, quot) = jh_factors(e, WallSide::Minus).unwrap();
    assert_eq!((sub, quot), (ChernClass::SKYSCRAPER - e, e));
    assert!(jh_factors(e, WallSide::Degenerate).is_none());
}

#[test]
fn exceptional_classes() {
    use localp2::exceptional::{epsilon, Dyadic};
    assert_eq!(
        exceptional_class(&epsilon(Dyadic::new(-1, 1))).unwrap(),
        ChernClass::from_twice(2, -1, -1)
    );
    assert_eq!(
        exceptional_class(&epsilon(Dyadic::new(3, 2))).unwrap(),
        ChernClass::from_twice(5, 3, -3)
    );
}

#[test]
fn semicircle_of_standard_collection() {
    let s = semicircle(&CollectionTriple::standard()).unwrap();
    assert_eq!(s.center, q(-1, 2));
    assert_eq!(s.rho, q(1, 4));
    assert_eq!(s.radius(), 0.5);
    assert!(s.contains(-0.5, 0.4));
    assert!(!s.contains(-0.5, 0.6));
    assert!(!s.contains(-0.5, -0.1));
}

#[test]
fn semicircles_on_orbit() {
    for (w, t) in braid_orbit(&CollectionTriple::standard(), 4) {
        if t.bundle_data.is_none() {
            continue;
        }
        let s = semicircle(&t).unwrap();
        assert!(s.rho > q(0, 1), "word {w}");
        assert!(s.radius() < 3.0 / 2f64.sqrt(), "word {w}");
    }
}

#[test]
fn rational_reconstruction() {
    assert_eq!(rational_within(0.4 + 1e-12, 1e-9).unwrap(), q(2, 5));
    assert_eq!(rational_within(-0.5, 1e-9).unwrap(), q(-1, 2));
    assert_eq!(match_exceptional(0.6000000001, 4, 1e-9).unwrap().alpha, q(3, 5));
    assert!(match_exceptional(1.0 / 3.0, 12, 1e-9).is_none());
    assert!(match_exceptional(f64::NAN, 12, 1e-9).is_none());
}

fn params() -> impl Strategy<Value = ChargeParams> {
    (-2.0f64..2.0, 0.05f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(ar, ai, br, bi)| ab(c(ar, ai), c(br, bi)))
}

fn class() -> impl Strategy<Value = ChernClass> {
    (-20i64..20, -20i64..20, -40i64..40).prop_map(|(r, d, c2)| ChernClass::from_twice(r, d, c2))
}

proptest! {
    #[test]
    fn tensor_shift_matches_charge(p in params(), x in class()) {
        let lhs = central_charge(&p.tensor_shift(), tensor_o1(x));
        let rhs = central_charge(&p, x);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn tensor_shift_moves_b(p in params()) {
        prop_assert!((p.tensor_shift().big_b() - (p.big_b() + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn verdict_invariant_under_tensor_shift(p in params()) {
        let v = in_geometric_chamber(&p, 8);
        let w = in_geometric_chamber(&p.tensor_shift(), 8);
        if !v.undecided && !w.undecided && v.margin.abs() > 1e-9 {
            prop_assert_eq!(v.member, w.member);
            prop_assert_eq!(v.failed_rule, w.failed_rule);
        }
    }

    #[test]
    fn stab_g_inside_chamber(p in params()) {
        if in_stab_g(&p) {
            prop_assert!(in_geometric_chamber(&p, 8).member);
        }
    }

    #[test]
    fn large_volume_in_stab_g(t in -3.0f64..3.0, m in 0.01f64..3.0) {
        prop_assert!(in_stab_g(&params_from_tm(t, m).unwrap()));
    }

    #[test]
    fn chamber_is_upward_closed(p in params(), s in 0.0f64..2.0) {
        let up = ab(p.a, p.b + s);
        if in_geometric_chamber(&p, 8).member {
            prop_assert!(in_geometric_chamber(&up, 8).member);
        }
    }

    #[test]
    fn gamma_between_parabolas(p in params(), t in -3.0f64..3.0) {
        let x = gamma_path_point(&p, t, 8).re;
        let base = p.b.re + p.a.re * p.a.re / 2.0 - (t - p.a.re).powi(2) / 2.0;
        prop_assert!(x >= base + 0.5 - 1e-12 && x <= base + 1.0 + 1e-12);
    }

    #[test]
    fn s_min_positive_in_chamber(p in params()) {
        if in_geometric_chamber(&p, 8).member {
            let s = s_min(&p, 8, 256).unwrap();
            prop_assert!(s.value > 0.0);
            prop_assert!(s.value <= gamma_path_point(&p, s.t_star, 8).norm() + 1e-12);
        }
    }

    #[test]
    fn norm_at_least_one(p in params()) {
        prop_assert!(matrix_norm_n(&p).unwrap() >= 1.0);
    }
}
