mod common;

use ade_core::arith::Ring;
use ade_core::curvefam::CurveFamily;
use ade_core::numfield::{FieldContext, InvariantPoint};
use ade_core::orbits::{
    char_poly_cofactor, companion_matrix, construct_orbit, divisibility, faddeev_leverrier, q_invariant, weak_shift,
    MonicPoly, OrbitMatrix,
};
use ade_core::rootsys::DynkinType;
use ade_core::scanner::{classify, DivisibilityClass};
use ade_core::AdeError;
use proptest::prelude::*;

/// `x^(m+1) + p_2 x^(m-1) + ... + p_(m+1)`.
fn family_poly(b: &InvariantPoint) -> MonicPoly {
    let mut c = vec![FieldContext::rationals().int(0)];
    c.extend(b.coords.iter().cloned());
    MonicPoly::new(c)
}

/// Every family point in a box and every prime up to 13 at which the discriminant
/// is divisible by the square: a shift exists exactly when the class is weak.
#[test]
fn shift_exists_iff_weak() {
    let k = FieldContext::rationals();
    let mut disagreements = Vec::new();
    let mut weak = 0;
    for (m, bound) in [(2usize, 60i64), (3, 12)] {
        let fam = CurveFamily::new(DynkinType::a(m));
        let mut idx = vec![-bound; m];
        loop {
            let b = InvariantPoint::from_ints(&idx);
            let f = family_poly(&b);
            if !f.discriminant(&k).is_zero() {
                for p in [2u64, 3, 5, 7, 11, 13] {
                    let prime = k.primes_above(p).remove(0);
                    let class = classify(&k, &fam, &b, &prime).unwrap();
                    if class == DivisibilityClass::NotDivisible {
                        continue;
                    }
                    weak += usize::from(class == DivisibilityClass::Weak);
                    let shift = weak_shift(&k, &f, &k.int(p as i64));
                    if shift.is_ok() != (class == DivisibilityClass::Weak) {
                        disagreements.push((m, idx.clone(), p, class));
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == m {
                    break;
                }
                idx[i] += 1;
                if idx[i] <= bound {
                    break;
                }
                idx[i] = -bound;
                i += 1;
            }
            if i == m {
                break;
            }
        }
    }
    assert!(weak > 0);
    assert!(disagreements.is_empty(), "{disagreements:?}");
}

/// `det(x - num)` against `f` rescaled by the denominator.
fn cofactor_matches(k: &FieldContext, w: &OrbitMatrix, f: &MonicPoly) -> bool {
    let r = k.ring();
    let n = w.size();
    let cof = char_poly_cofactor(k, &w.num);
    (0..=n).all(|j| {
        let b = if j == n { k.int(1) } else { f.coeffs[n - 1 - j].clone() };
        cof[j] == r.mul(&b, &r.pow(&w.den, (n - j) as u32))
    })
}

fn gaussian(a: i64, b: i64) -> ade_core::numfield::RingInt {
    FieldContext::gaussian().element(a, b).unwrap()
}

#[test]
fn shift_examples() {
    let k = FieldContext::rationals();
    let f = MonicPoly::from_ints(&[0, -2, 4]);
    assert_eq!(weak_shift(&k, &f, &k.int(1)).unwrap(), k.int(0));
    let strong = MonicPoly::from_ints(&[0, -3, 0]);
    let p3 = k.primes_above(3).remove(0);
    assert_eq!(divisibility(&k, &strong, &p3).unwrap(), DivisibilityClass::Strong);
    assert!(matches!(weak_shift(&k, &strong, &k.int(3)), Err(AdeError::NoShift(_))));
    assert!(matches!(weak_shift(&k, &f, &k.int(25)), Err(AdeError::InvalidInput(_))));
}

#[test]
fn unit_m_gives_ones_on_the_superdiagonal() {
    let k = FieldContext::rationals();
    let f = MonicPoly::from_ints(&[3, -1, 4, 1, -5]);
    let w = construct_orbit(&k, &f, &k.int(1)).unwrap();
    assert!(w.has_char_poly(&k, &f));
    assert_eq!(w.superdiagonal(&k).unwrap(), vec![k.int(1); 4]);
    assert_eq!(q_invariant(&k, &w).unwrap(), k.int(1));
}

#[test]
fn shape_errors() {
    let k = FieldContext::rationals();
    let f = MonicPoly::from_ints(&[0, 0, 0, 1]);
    let mut w = companion_matrix(&k, &f);
    w.num[0][3] = k.int(1);
    assert!(matches!(q_invariant(&k, &w), Err(AdeError::ShapeError(_))));
    let mut w = companion_matrix(&k, &f);
    w.num[0][1] = k.ring().mul(&w.den, &k.int(7));
    assert!(matches!(q_invariant(&k, &w), Err(AdeError::ShapeError(_))));
}

#[test]
fn gaussian_orbits() {
    let k = FieldContext::gaussian();
    let r = k.ring();
    let mut built = 0;
    for (m, seed) in [(gaussian(2, 1), 1i64), (gaussian(3, 2), 2), (gaussian(1, 1), 3)] {
        for t in 0..20 {
            // (x - s)^2 (x + c) + m a (x - s) + m^2 e
            let s = gaussian(seed + t % 3, t % 2);
            let c = gaussian(t - 4, 1 - t % 3);
            let a = gaussian(1 + t % 2, 0);
            let e = gaussian(t % 3 - 1, 1);
            let x2 = [r.mul(&s, &s), r.neg(&r.mul(&k.int(2), &s)), k.int(1)];
            let mut dense = vec![k.int(0); 4];
            for (i, q) in x2.iter().enumerate() {
                dense[i] = r.add(&dense[i], &r.mul(q, &c));
                dense[i + 1] = r.add(&dense[i + 1], q);
            }
            dense[1] = r.add(&dense[1], &r.mul(&m, &a));
            dense[0] = r.add(&dense[0], &r.add(&r.neg(&r.mul(&r.mul(&m, &a), &s)), &r.mul(&r.mul(&m, &m), &e)));
            let f = MonicPoly::new(dense[..3].iter().rev().cloned().collect());
            if f.discriminant(&k).is_zero() {
                continue;
            }
            let Ok(w) = construct_orbit(&k, &f, &m) else {
                continue;
            };
            built += 1;
            assert!(w.has_char_poly(&k, &f));
            assert!(cofactor_matches(&k, &w, &f));
            assert!(w.is_quarter_integral(&k));
            assert_eq!(q_invariant(&k, &w).unwrap(), m);
        }
    }
    assert!(built > 10, "only {built} constructions");
}

#[test]
fn certified_pairs_build() {
    let k = FieldContext::rationals();
    for (f, m) in common::weak_pairs(5, 3, &[3, 5, 7, 11, 13, 35], 40) {
        let w = construct_orbit(&k, &f, &k.int(m as i64)).unwrap();
        assert!(w.has_char_poly(&k, &f) && cofactor_matches(&k, &w, &f));
        assert!(w.is_quarter_integral(&k));
        // Q exceeds any M below m
        let q = q_invariant(&k, &w).unwrap();
        assert_eq!(q, k.int(m as i64));
        assert!(k.abs_norm(&q) > num_bigint::BigInt::from(m - 1));
    }
}

fn poly_strategy() -> impl Strategy<Value = Vec<i64>> {
    (1usize..=6).prop_flat_map(|d| prop::collection::vec(-30i64..=30, d + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn companion_has_the_target_char_poly(b in poly_strategy()) {
        let k = FieldContext::rationals();
        let f = MonicPoly::from_ints(&b);
        let w = companion_matrix(&k, &f);
        prop_assert!(w.has_char_poly(&k, &f));
        prop_assert!(cofactor_matches(&k, &w, &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_char_poly_routines_agree(n in 1usize..=6, raw in prop::collection::vec((-9i64..=9, -9i64..=9), 36), gauss in any::<bool>()) {
        let k = if gauss { FieldContext::gaussian() } else { FieldContext::rationals() };
        let a: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| {
            let (x, y) = raw[i * 6 + j];
            k.element(x, if gauss { y } else { 0 }).unwrap()
        }).collect()).collect();
        let fl = faddeev_leverrier(&k, &a);
        let cof = char_poly_cofactor(&k, &a);
        for (i, c) in fl.iter().enumerate() {
            prop_assert_eq!(c, &cof[n - 1 - i]);
        }
    }

    #[test]
    fn q_is_multiplicative_in_each_coordinate(b in prop::collection::vec(-20i64..=20, 5), slot in 0usize..5, t in -7i64..=7) {
        prop_assume!(t != 0);
        let k = FieldContext::rationals();
        let r = k.ring();
        let w = companion_matrix(&k, &MonicPoly::from_ints(&b));
        let n = w.size() - 1;
        let q0 = q_invariant(&k, &w).unwrap();
        let mut v = w.clone();
        for i in [slot % n, n - 1 - slot % n] {
            v.num[i][i + 1] = r.mul(&w.num[i][i + 1], &k.int(t));
        }
        prop_assert_eq!(q_invariant(&k, &v).unwrap(), r.mul(&q0, &k.int(t)));
    }
}
