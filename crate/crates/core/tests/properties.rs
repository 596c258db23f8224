use std::sync::Arc;

use compactnet::gauge::{check_subadditivity, Gauge};
use compactnet::nets::net_of;
use compactnet::notation::{format_point, parse_point};
use compactnet::quotient::{canonical, cantor_distance, equiv_wrt_f, f_eval, f_preimages, g_eval, lipschitz_witness};
use compactnet::rational::{int, rat, Rational};
use compactnet::{BinarySeq, NetCertificate, Point, ProductPoint, Space};
use num_traits::Zero;
use proptest::prelude::*;

fn cantor_point() -> impl Strategy<Value = ProductPoint> {
    (prop::collection::vec(0usize..2, 0..10), 0usize..2)
        .prop_map(|(bits, tail)| ProductPoint::new(bits.into_iter().map(Point::Discrete).collect(), tail))
}

fn bits() -> impl Strategy<Value = BinarySeq> {
    (prop::collection::vec(any::<bool>(), 0..10), any::<bool>()).prop_map(|(p, t)| BinarySeq::new(p, t))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (0i64..200, 1i64..40).prop_map(|(n, d)| rat(n, d))
}

/// A 3-cycle of binary, a 3-point path and [0, 2].
fn mixed_product() -> Space {
    use compactnet::product::{ComponentGenerator, WeightSequence};
    let path = Space::finite(
        "path",
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![int(0), int(1), int(2)],
            vec![int(1), int(0), int(1)],
            vec![int(2), int(1), int(0)],
        ],
    )
    .unwrap();
    let iv = Space::interval("I", int(0), int(2)).unwrap();
    let gen = ComponentGenerator::new(vec![Arc::new(Space::binary()), Arc::new(path), Arc::new(iv)]).unwrap();
    Space::countable_product("mixed", gen, WeightSequence::geometric(rat(1, 3), int(1)).unwrap(), 0).unwrap()
}

fn mixed_point() -> impl Strategy<Value = ProductPoint> {
    (prop::collection::vec((0usize..2, 0usize..3, 0i64..9), 0..4), 0usize..2).prop_map(|(cs, tail)| {
        let mut prefix = Vec::new();
        for (b, p, r) in cs {
            prefix.push(Point::Discrete(b));
            prefix.push(Point::Discrete(p));
            prefix.push(Point::Real(rat(r, 4)));
        }
        ProductPoint::new(prefix, tail)
    })
}

proptest! {
    #[test]
    fn product_metric_axioms(x in cantor_point(), y in cantor_point(), z in cantor_point()) {
        let s = Space::cantor();
        let (px, py, pz) = (Point::Sequence(x.clone()), Point::Sequence(y.clone()), Point::Sequence(z));
        let dxy = s.distance(&px, &py).unwrap();
        prop_assert!(dxy >= Rational::zero());
        prop_assert_eq!(&dxy, &s.distance(&py, &px).unwrap());
        prop_assert_eq!(dxy.is_zero(), s.same_point(&px, &py));
        prop_assert!(dxy <= s.distance(&px, &pz).unwrap() + s.distance(&pz, &py).unwrap());
        prop_assert!(dxy <= *s.declared_bound());
    }

    #[test]
    fn mixed_product_triangle(x in mixed_point(), y in mixed_point(), z in mixed_point()) {
        let s = mixed_product();
        let (px, py, pz) = (Point::Sequence(x), Point::Sequence(y), Point::Sequence(z));
        let dxy = s.distance(&px, &py).unwrap();
        prop_assert!(dxy <= s.distance(&px, &pz).unwrap() + s.distance(&pz, &py).unwrap());
        prop_assert!(dxy <= *s.declared_bound());
    }

    #[test]
    fn truncation_error_is_within_tail(x in mixed_point(), y in mixed_point(), n in 1usize..12) {
        let s = mixed_product();
        let cp = s.as_countable_product().unwrap();
        let d = s.distance(&Point::Sequence(x.clone()), &Point::Sequence(y.clone())).unwrap();
        let gap = d - cp.partial_sum(&x, &y, n);
        prop_assert!(gap >= Rational::zero());
        prop_assert!(gap <= cp.tail_bound(n).unwrap());
    }

    #[test]
    fn ball_open_witnesses(x in cantor_point(), y in cantor_point(), num in 1i64..16) {
        let s = Space::cantor();
        let cp = s.as_countable_product().unwrap();
        let eps = rat(num, 16);
        let v = cp.ball_to_open(&x, &eps).unwrap();
        let d = s.distance(&Point::Sequence(x.clone()), &Point::Sequence(y.clone())).unwrap();
        if v.contains(cp, &y) {
            prop_assert!(d < eps);
        }
        if d < cp.open_to_ball(&v) {
            prop_assert!(v.contains(cp, &y));
        }
    }

    #[test]
    fn cantor_distance_matches_product(x in bits(), y in bits()) {
        let s = Space::cantor();
        let d = s
            .distance(&Point::Sequence(x.to_product_point()), &Point::Sequence(y.to_product_point()))
            .unwrap();
        prop_assert_eq!(cantor_distance(&x, &y), d);
    }

    #[test]
    fn quotient_laws(x in bits(), y in bits(), z in bits()) {
        prop_assert!(equiv_wrt_f(&x, &x));
        prop_assert_eq!(equiv_wrt_f(&x, &y), equiv_wrt_f(&y, &x));
        if equiv_wrt_f(&x, &y) && equiv_wrt_f(&y, &z) {
            prop_assert!(equiv_wrt_f(&x, &z));
        }
        prop_assert!(equiv_wrt_f(&x, &canonical(&x)));
        prop_assert_eq!(g_eval(&x), f_eval(&x));
        prop_assert!(f_preimages(&f_eval(&x)).contains(&x));
        prop_assert!(lipschitz_witness(&x, &y).holds);
    }

    #[test]
    fn gauges_are_subadditive(grid in prop::collection::vec(small_rational(), 1..12), a in small_rational()) {
        let bend = Gauge::rational_bend(int(1)).unwrap();
        prop_assert!(check_subadditivity(&bend, &grid).unwrap().is_clean());
        if a > Rational::zero() {
            let cap = Gauge::cap(a).unwrap();
            prop_assert!(check_subadditivity(&cap, &grid).unwrap().is_clean());
        }
    }

    #[test]
    fn notation_round_trip(x in mixed_point()) {
        let s = mixed_product();
        let p = Point::Sequence(x);
        let text = format_point(&s, &p);
        prop_assert_eq!(parse_point(&s, &text).unwrap(), p);
    }

    #[test]
    fn certificate_round_trip(num in 1i64..8) {
        let s = mixed_product();
        let cert = net_of(&s, &rat(num, 4)).unwrap();
        let text = cert.to_text(&s);
        prop_assert_eq!(NetCertificate::parse(&text, &s).unwrap(), cert);
    }
}
