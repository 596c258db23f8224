//! Library results compared against brute-force reimplementations that
//! share no code with the library beyond the rational type.

use std::sync::Arc;

use compactnet::nets::{bw_extract_with, net_of, probe_universe, verify_coverage_with};
use compactnet::product::{ComponentGenerator, WeightSequence};
use compactnet::rational::{int, rat, Rational};
use compactnet::{Exec, Point, ProductPoint, Probes, Space};
use num_traits::{One, Signed, Zero};

/// Bit `i` (1-based) of a binary product point.
fn bit(p: &ProductPoint, i: usize) -> usize {
    match p.prefix.get(i - 1) {
        Some(Point::Discrete(b)) => *b,
        Some(other) => panic!("not a bit: {other}"),
        None => p.tail_anchor,
    }
}

/// `Σ 2⁻ⁱ|xᵢ − yᵢ|`, summing explicit coordinates one by one and closing
/// the tail with `2⁻ᵐ` when the tails differ.
fn cantor_d(x: &ProductPoint, y: &ProductPoint) -> Rational {
    let m = x.prefix.len().max(y.prefix.len());
    let mut w = Rational::one();
    let mut sum = Rational::zero();
    for i in 1..=m {
        w /= int(2);
        if bit(x, i) != bit(y, i) {
            sum += &w;
        }
    }
    if x.tail_anchor != y.tail_anchor {
        sum += w;
    }
    sum
}

fn seq(p: &Point) -> &ProductPoint {
    match p {
        Point::Sequence(s) => s,
        other => panic!("not a sequence: {other}"),
    }
}

#[test]
fn cantor_nets_cover_by_brute_force() {
    let s = Space::cantor();
    let probes = probe_universe(&s, 6).unwrap();
    assert_eq!(probes.len(), 128);
    for k in 1..=5 {
        let eps = rat(1, 1 << k);
        let cert = net_of(&s, &eps).unwrap();
        for probe in &probes {
            let nearest = cert.points.iter().map(|c| cantor_d(seq(c), seq(probe))).min().unwrap();
            assert!(nearest < eps, "eps {eps}: probe {probe} nearest {nearest}");
        }
        let report = verify_coverage_with(&s, &cert, &probes, Exec::Sequential).unwrap();
        assert!(report.is_covered());
    }
}

#[test]
fn product_distance_matches_bitwise_sum() {
    let s = Space::cantor();
    let probes = probe_universe(&s, 5).unwrap();
    for x in &probes {
        for y in &probes {
            assert_eq!(s.distance(x, y).unwrap(), cantor_d(seq(x), seq(y)));
        }
    }
}

#[test]
fn interval_nets_cover_fine_grid() {
    for (lo, hi) in [(int(0), int(1)), (rat(-1, 2), rat(3, 2)), (int(2), rat(7, 3))] {
        let s = Space::interval("I", lo.clone(), hi.clone()).unwrap();
        for eps in [rat(1, 3), rat(1, 7), rat(2, 5), int(5)] {
            let cert = net_of(&s, &eps).unwrap();
            let span = &hi - &lo;
            for k in 0..=240 {
                let t = &lo + &span * rat(k, 240);
                let nearest = cert
                    .points
                    .iter()
                    .map(|c| match c {
                        Point::Real(r) => (r - &t).abs(),
                        other => panic!("not a real: {other}"),
                    })
                    .min()
                    .unwrap();
                assert!(nearest < eps, "[{lo},{hi}] eps {eps}: {t} nearest {nearest}");
            }
        }
    }
}

fn path(n: usize) -> Space {
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let table = (0..n)
        .map(|i| (0..n).map(|j| int((i as i64 - j as i64).abs())).collect())
        .collect();
    Space::finite("path", labels, table).unwrap()
}

#[test]
fn sequential_and_parallel_agree() {
    let p = Arc::new(path(5));
    let gen = ComponentGenerator::new(vec![Arc::new(Space::binary()), p.clone()]).unwrap();
    let s = Space::countable_product("mix", gen, WeightSequence::geometric(rat(1, 2), int(1)).unwrap(), 1).unwrap();
    let probes = probe_universe(&s, 4).unwrap();
    let cert = net_of(&s, &rat(1, 3)).unwrap();
    assert_eq!(
        verify_coverage_with(&s, &cert, &probes, Exec::Sequential).unwrap(),
        verify_coverage_with(&s, &cert, &probes, Exec::Parallel).unwrap()
    );

    let big = path(20);
    assert_eq!(
        big.check_axioms_with(Probes::Exhaustive, Exec::Sequential).unwrap(),
        big.check_axioms_with(Probes::Exhaustive, Exec::Parallel).unwrap()
    );
    let few = &probes[..12];
    assert_eq!(
        s.check_axioms_with(Probes::Points(few), Exec::Sequential).unwrap(),
        s.check_axioms_with(Probes::Points(few), Exec::Parallel).unwrap()
    );

    let term = |k: usize| probes[(k * 7) % probes.len()].clone();
    assert_eq!(
        bw_extract_with(&s, term, 40, 3, Exec::Sequential).unwrap(),
        bw_extract_with(&s, term, 40, 3, Exec::Parallel).unwrap()
    );
}

#[test]
fn path_space_triangle_count() {
    let report = path(6).check_axioms(Probes::Exhaustive).unwrap();
    assert!(report.is_clean());
    assert_eq!(report.triples_checked, 216);
}
