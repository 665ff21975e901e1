use ade_core::curvefam::{discriminant_a, CurveFamily};
use ade_core::numfield::{FieldContext, InvariantPoint};
use ade_core::rootsys::DynkinType;
use ade_core::scanner::{classify, classify_brute, count_sigma, enumerate_sigma, scan, DivisibilityClass, ScanConfig};
use num_traits::Signed;
use proptest::prelude::*;

fn a(m: usize) -> CurveFamily {
    CurveFamily::new(DynkinType::a(m))
}

#[test]
fn small_box_over_q() {
    // max(|p2|^(1/2), |p3|^(1/3)) < 2: primitive, least of (p2, p3) and (p2, -p3)
    let mut want = Vec::new();
    for p2 in -3i64..=3 {
        for p3 in -7i64..=7 {
            if (p2, p3) == (0, 0) || (p2, -p3) < (p2, p3) {
                continue;
            }
            let imprimitive = [2i64, 3, 5, 7].iter().any(|&p| p2 % (p * p) == 0 && p3 % (p * p * p) == 0);
            if !imprimitive {
                want.push(InvariantPoint::from_ints(&[p2, p3]));
            }
        }
    }
    assert_eq!(enumerate_sigma(&FieldContext::rationals(), &a(2), 2), want);
}

#[test]
fn counts_match_enumeration_in_every_field() {
    for tag in [0, -1, -2, -3, -7] {
        let k = FieldContext::new(tag).unwrap();
        for (m, xs) in [(2usize, 1..=4u64), (3, 1..=2)] {
            for x in xs {
                assert_eq!(
                    enumerate_sigma(&k, &a(m), x).len() as u128,
                    count_sigma(&k, &a(m), x),
                    "tag {tag} A{m} X {x}"
                );
            }
        }
    }
}

#[test]
fn enumeration_is_monotone_in_x() {
    for k in [FieldContext::rationals(), FieldContext::gaussian()] {
        let small = enumerate_sigma(&k, &a(2), 3);
        let large = enumerate_sigma(&k, &a(2), 4);
        assert!(small.iter().all(|b| large.contains(b)));
    }
}

#[test]
fn reports_are_consistent() {
    for (k, m, x) in [
        (FieldContext::rationals(), 2, 6),
        (FieldContext::gaussian(), 2, 3),
        (FieldContext::rationals(), 3, 3),
        (FieldContext::new(-3).unwrap(), 3, 2),
    ] {
        let r = scan(&k, &a(m), &ScanConfig { x, prime_bound: 30, ..Default::default() }).unwrap();
        assert_eq!(r.total as u128, count_sigma(&k, &a(m), x));
        assert!(r.squarefree_count + r.undecided <= r.total);
        let nonzero = r.total - r.zero_discriminant;
        for t in &r.tallies {
            assert_eq!(t.not_divisible + t.weak + t.strong, nonzero, "{}", t.label);
        }
        assert_eq!(r.classifier_disagreements, 0);
        for w in r.tail_counts.windows(2) {
            assert!(w[1].combined <= w[0].combined && w[1].strong <= w[0].strong && w[1].weak <= w[0].weak);
        }
        assert!(r.tail_counts.iter().all(|t| t.weak_coprime <= t.weak));
    }
}

#[test]
fn tails_vanish_beyond_the_discriminant() {
    let k = FieldContext::rationals();
    let pts = enumerate_sigma(&k, &a(2), 5);
    let max = pts.iter().map(|b| discriminant_a(&k, &a(2), b).unwrap().a.abs()).max().unwrap();
    let cut = (max.bits() as f64 / 2.0).exp2() * 2.0;
    let r = scan(&k, &a(2), &ScanConfig { x: 5, m_grid: vec![cut], ..Default::default() }).unwrap();
    let row = r.tail_counts.iter().find(|t| t.m == cut).unwrap();
    assert_eq!(row.combined, 0);
}

#[test]
fn scans_do_not_depend_on_worker_count() {
    let k = FieldContext::rationals();
    let cfg = ScanConfig { x: 7, ..Default::default() };
    let run =
        |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| scan(&k, &a(2), &cfg).unwrap());
    assert_eq!(run(1), run(3));
}

#[test]
fn dump_records_every_point() {
    let k = FieldContext::rationals();
    let r = scan(&k, &a(2), &ScanConfig { x: 3, dump: true, ..Default::default() }).unwrap();
    let recs = r.records.unwrap();
    assert_eq!(recs.len() as u64, r.total);
    assert_eq!(recs.iter().filter(|p| p.squarefree == Some(true)).count() as u64, r.squarefree_count);
}

fn field() -> impl Strategy<Value = FieldContext> {
    prop_oneof![Just(0i64), Just(-1), Just(-3)].prop_map(|t| FieldContext::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_classifier_matches_brute_force(k in field(), m in 2usize..=3, raw in prop::collection::vec((-40i64..=40, -40i64..=40), 3), p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(11), Just(13)]) {
        let coords = (0..m).map(|i| if k.tag() == 0 { k.int(raw[i].0) } else { k.element(raw[i].0, raw[i].1).unwrap() }).collect();
        let b = InvariantPoint::new(coords);
        prop_assume!(!discriminant_a(&k, &a(m), &b).unwrap().is_zero());
        for prime in k.primes_above(p).into_iter().filter(|q| q.norm <= 13) {
            prop_assert_eq!(classify(&k, &a(m), &b, &prime).unwrap(), classify_brute(&k, &a(m), &b, &prime).unwrap());
        }
    }

    #[test]
    fn pinned_strong_example_is_stable_under_lifts(c in -20i64..=20, d in -20i64..=20) {
        let k = FieldContext::rationals();
        let b = InvariantPoint::from_ints(&[3 + 9 * c, 9 * d]);
        let prime = k.primes_above(3).remove(0);
        let class = classify(&k, &a(2), &b, &prime).unwrap();
        prop_assert_eq!(class, classify_brute(&k, &a(2), &b, &prime).unwrap());
        prop_assert_ne!(class, DivisibilityClass::NotDivisible);
    }
}
