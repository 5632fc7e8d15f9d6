mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use ratcurve::arith::{int, rational_roots_low, Height, Rational};
use ratcurve::curve::{AffinePoint, PlaneCurve};
use ratcurve::elliptic::{
    cubic_to_weierstrass, ec_add, nagell_lutz_torsion, order_of_point, ECPoint, Order, WeierstrassCurve,
};
use ratcurve::excise::{build_excision_system, find_projection_center, Pullback};
use ratcurve::genus0::{find_conic_point, sweep_enumerate, Conic};
use ratcurve::oracle::conic_solvable_u64;
use ratcurve::poly::{parse_polynomial, Monomial, MultiPoly, Var};
use ratcurve::zerodim::PolySystem;

use common::{brute_force_solutions, conic_has_point, divisor_roots, tuple_height};

fn poly_strategy(max_deg: u32, vars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), (0..=max_deg), -9i64..=9), 1..6).prop_map(move |terms| {
        MultiPoly::from_terms(terms.into_iter().map(|(i, j, k, c)| {
            let e = [i, if vars > 1 { j } else { 0 }, if vars > 2 { k } else { 0 }];
            (Monomial(e), BigInt::from(c))
        }))
    })
}

/// Integer points on `y^2 = x^3 + 17` and their negatives.
fn mordell_points() -> Vec<ECPoint> {
    let mut out = Vec::new();
    for (x, y) in [(-2, 3), (-1, 4), (2, 5), (4, 9), (8, 23), (43, 282), (52, 375)] {
        out.push(ECPoint::Affine(int(x), int(y)));
        out.push(ECPoint::Affine(int(x), int(-y)));
    }
    out.push(ECPoint::Infinity);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_text_round_trips(p in poly_strategy(4, 3)) {
        let c = p.canonical();
        prop_assert_eq!(parse_polynomial(&c.to_string()).unwrap(), c.clone());
        let json = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<MultiPoly>(&json).unwrap(), c);
    }

    #[test]
    fn roots_match_divisor_enumeration(
        roots in prop::collection::vec((-6i64..=6, 1i64..=4), 0..4),
        extra in prop::collection::vec(-5i64..=5, 0..3),
        lead in 1i64..=3,
    ) {
        // product of (q x - p) with a random cofactor
        let mut coeffs = vec![BigInt::from(lead)];
        let mut mul = |f: &[i64]| {
            let mut out = vec![BigInt::zero(); coeffs.len() + f.len() - 1];
            for (i, a) in coeffs.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            coeffs = out;
        };
        for (p, q) in &roots {
            mul(&[-p, *q]);
        }
        if !extra.is_empty() {
            let mut f = extra.clone();
            f.push(1);
            mul(&f);
        }
        prop_assert_eq!(rational_roots_low(&coeffs), divisor_roots(&coeffs));
    }

    #[test]
    fn group_law_is_commutative_and_associative(i in 0usize..15, j in 0usize..15, k in 0usize..15) {
        let w = WeierstrassCurve::from_small(0, 17).unwrap();
        let pts = mordell_points();
        let (p, q, r) = (&pts[i], &pts[j], &pts[k]);
        prop_assert_eq!(ec_add(&w, p, q), ec_add(&w, q, p));
        let left = ec_add(&w, &ec_add(&w, p, q), r);
        let right = ec_add(&w, p, &ec_add(&w, q, r));
        prop_assert!(w.contains(&left));
        prop_assert_eq!(left, right);
        prop_assert_eq!(ec_add(&w, p, &p.neg()), ECPoint::Infinity);
    }

    #[test]
    fn torsion_points_are_integral_with_closed_fibers(a in -12i64..=12, b in -12i64..=12) {
        prop_assume!(4 * a * a * a + 27 * b * b != 0);
        let w = WeierstrassCurve::from_small(a, b).unwrap();
        let c = w.curve();
        for t in nagell_lutz_torsion(&w) {
            let ECPoint::Affine(x, y) = &t else { unreachable!() };
            prop_assert!(x.is_integer() && y.is_integer());
            prop_assert!(matches!(order_of_point(&w, &t), Order::Finite(n) if n <= 12));
            let mut fiber = c.fiber_solutions(x).unwrap();
            fiber.sort();
            let mut want = vec![y.clone(), -y.clone()];
            want.sort();
            want.dedup();
            prop_assert_eq!(&fiber, &want);
            for y2 in fiber {
                prop_assert!(matches!(order_of_point(&w, &ECPoint::Affine(x.clone(), y2)), Order::Finite(_)));
            }
        }
    }

    #[test]
    fn enumeration_is_monotone(p in poly_strategy(3, 2), b in 1u64..5) {
        let Ok(c) = PlaneCurve::unchecked(p) else { return Ok(()) };
        let small = c.enumerate_points(b);
        let large = c.enumerate_points(b + 1);
        prop_assert!(small.iter().all(|q| large.contains(q)));
        prop_assert!(small.iter().all(|q| c.contains(q) && q.height() <= Height::from(b)));
    }

    #[test]
    fn genus_is_symmetric_in_x_and_y(p in poly_strategy(4, 2)) {
        let Ok(c) = PlaneCurve::unchecked(p) else { return Ok(()) };
        let Ok(d) = PlaneCurve::unchecked(c.f.swap_vars(Var::X, Var::Y)) else { return Ok(()) };
        prop_assert_eq!(c.genus().ok(), d.genus().ok());
    }

    #[test]
    fn conic_decider_matches_legendre(a in 1u64..=60, b in 1u64..=60, c in 1u64..=60) {
        prop_assert_eq!(conic_solvable_u64(a, b, c), conic_has_point(a as i64, b as i64, c as i64));
    }

    #[test]
    fn sweep_finds_every_small_point(a in 1u64..=12, b in 1u64..=12, c in 1u64..=30) {
        let q = Conic::from_small(a, b, c).unwrap();
        if let Some(base) = find_conic_point(&q) {
            prop_assert_eq!(sweep_enumerate(&q, &base, 5).unwrap(), q.curve().enumerate_points(5));
        } else {
            prop_assert!(q.curve().enumerate_points(5).is_empty());
        }
    }

    #[test]
    fn planted_systems_match_brute_force(
        px in -3i64..=3, py in 1i64..=3,
        c1 in prop::collection::vec(-3i64..=3, 6),
        c2 in prop::collection::vec(-3i64..=3, 6),
    ) {
        let planted = [int(px), Rational::new(1.into(), py.into())];
        let mons = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        let make = |cs: &[i64]| {
            let f = MultiPoly::from_terms(cs.iter().zip(mons).map(|(c, [i, j])| (Monomial([i, j, 0]), BigInt::from(*c))));
            let v = f.eval(&[planted[0].clone(), planted[1].clone(), Rational::zero()]);
            &f.scale(v.denom()) - &MultiPoly::constant(v.numer().clone())
        };
        let eqs = vec![make(&c1), make(&c2)];
        prop_assume!(eqs.iter().all(|e| e.uses(Var::X) && e.uses(Var::Y)));
        let sys = PolySystem::new(eqs.clone(), vec![Var::X, Var::Y]).unwrap();
        if let Ok(sols) = sys.rational_solutions() {
            let bounded: Vec<Vec<Rational>> =
                sols.iter().filter(|s| tuple_height(s) <= Height::from(4)).cloned().collect();
            prop_assert_eq!(bounded, brute_force_solutions(&eqs, 2, 4));
            prop_assert!(sols.contains(&planted.to_vec()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn excision_projects_and_pulls_back(c in 1i64..=6, k in 0usize..3) {
        // x^2 + y^2 = 2 c^2 has the point (c, c); remove one fiber through it
        let f = parse_polynomial(&format!("x^2 + y^2 - {}", 2 * c * c)).unwrap();
        let curve = PlaneCurve::new(f).unwrap();
        let xs = [int(c), int(-c), int(0)];
        let s = build_excision_system(&curve, &xs[k..k + 1]).unwrap();
        let rec = find_projection_center(&s, 3, 6).unwrap();
        for p in curve.enumerate_points(6) {
            match rec.project(&p) {
                Some(q) => prop_assert_eq!(rec.pullback_point(&q).unwrap(), Pullback::Point(p)),
                None => prop_assert_eq!(&p.x, &xs[k]),
            }
        }
    }
}

#[test]
fn cubic_maps_round_trip_on_small_points() {
    for (eq, base) in [
        ("x^3 + y^3 - 9", (1, 2)),
        ("x^3 + y^3 - 1", (1, 0)),
        ("x^3 + y^3 - 1", (0, 1)),
        ("y^2 + xy + y - x^3 + x", (0, 0)),
        ("y^2 + y - x^3 + x", (0, 0)),
        ("y^2 - x^3 - 17", (-2, 3)),
    ] {
        let c = PlaneCurve::new(parse_polynomial(eq).unwrap()).unwrap();
        let p = AffinePoint::new(int(base.0), int(base.1));
        let (w, maps) = cubic_to_weierstrass(&c, &p).unwrap();
        let mut checked = 0;
        for q in c.enumerate_points(10) {
            let Some(img) = maps.forward.apply(&q) else { continue };
            assert!(w.contains(&ECPoint::Affine(img.x.clone(), img.y.clone())), "{eq}: {q} -> {img}");
            if let Some(back) = maps.backward.apply(&img) {
                assert_eq!(back, q, "{eq}");
                checked += 1;
            }
        }
        assert!(checked > 0, "{eq}: no point off the exceptional loci");
    }
}
