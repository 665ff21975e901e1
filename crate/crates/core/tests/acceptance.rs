//! One line per acceptance criterion; the test fails if any criterion fails.

mod common;

use ade_core::arith::Ring;
use ade_core::curvefam::CurveFamily;
use ade_core::localdens::{
    count_zeros_accelerated, count_zeros_brute, euler_product, local_density, local_density_brute,
};
use ade_core::numfield::{FieldContext, InvariantPoint};
use ade_core::orbits::{char_poly_cofactor, construct_orbit, q_invariant};
use ade_core::rootsys::{cusp_exponents, graded_decomposition, verify_exponent_identity, DynkinType};
use ade_core::scanner::{
    classify, classify_brute, count_sigma, decay_from_rows, enumerate_sigma, scan, slope_fit, DivisibilityClass,
    ScanConfig,
};
use num_rational::BigRational;
use std::io::Write;
use std::time::Instant;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn stated_z(t: DynkinType) -> (Vec<i64>, usize) {
    match (t.to_string().as_str(), t.rank) {
        ("E6", _) => (vec![4, 2, 8, 6], 42),
        ("E7", _) => (vec![2, 5, 6, 8, 7, 4, 3], 70),
        ("E8", _) => (vec![4, 8, 10, 14, 12, 8, 6, 2], 128),
        (_, r) if r % 2 == 1 => {
            let n = (r as i64 - 1) / 2;
            ((1..=n).flat_map(|i| [2 * i, 2 * i]).collect(), ((2 * n + 1) * (2 * n + 1)) as usize)
        }
        (_, r) => {
            let n = r as i64 / 2;
            let mut z: Vec<i64> = (1..n).flat_map(|i| [2 * i, 2 * i]).collect();
            z.extend([n, n]);
            (z, (4 * n * n) as usize)
        }
    }
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let mut types: Vec<DynkinType> = (6..=8).map(DynkinType::e).collect();
    types.extend((4..=13).map(DynkinType::d));
    let mut bad = Vec::new();
    for t in types {
        let c = cusp_exponents(t);
        let (z, xp) = stated_z(t);
        if c.z != z || c.x_power != xp || verify_exponent_identity(t).is_err() {
            bad.push(t.to_string());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 1,
        pass: bad.is_empty() && secs < 5.0,
        detail: format!("E6-E8 and D4-D13 exponents and X-powers; mismatches {bad:?}; {secs:.2}s"),
    }
}

fn criterion_2() -> Line {
    let start = Instant::now();
    let mut types: Vec<DynkinType> = (2..=10).map(DynkinType::a).collect();
    types.extend((4..=12).map(DynkinType::d));
    types.extend((6..=8).map(DynkinType::e));
    let bad: Vec<String> = types
        .iter()
        .filter(|&&t| CurveFamily::new(t).degree_sum() as usize != graded_decomposition(t).v_dim)
        .map(|t| t.to_string())
        .collect();
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 2,
        pass: bad.is_empty() && secs < 5.0,
        detail: format!("sum of degrees = dim V; failures {bad:?}; {secs:.2}s"),
    }
}

fn criterion_3() -> Line {
    let q = FieldContext::rationals();
    let f = CurveFamily::new(DynkinType::a(2));
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, num, den) in [(2u64, 1, 2), (3, 2, 3)] {
        let prime = q.primes_above(p).remove(0);
        let brute = local_density_brute(&q, &f, &prime, u128::MAX).unwrap().rho;
        let fast = local_density(&q, &f, &prime).unwrap().rho;
        let want = BigRational::new(num.into(), den.into());
        ok &= brute == want && fast == want;
        notes.push(format!("rho_{p} = {brute}"));
    }
    let mut checked = 0;
    for prime in q.primes_up_to_norm(100) {
        let a = count_zeros_accelerated(&q, &f, &prime, u128::MAX).unwrap();
        let b = count_zeros_brute(&q, &f, &prime, u128::MAX).unwrap();
        ok &= a == b;
        checked += 1;
    }
    Line { id: 3, pass: ok, detail: format!("{}; accelerated = brute at {checked} primes p <= 100", notes.join(", ")) }
}

fn criterion_5() -> Line {
    let f = CurveFamily::new(DynkinType::a(2));
    let q = FieldContext::rationals();
    let gi = FieldContext::gaussian();
    let exact = enumerate_sigma(&q, &f, 10).len() as u128 == count_sigma(&q, &f, 10)
        && enumerate_sigma(&gi, &f, 4).len() as u128 == count_sigma(&gi, &f, 4);
    let fit = |k: &FieldContext, xs: std::ops::RangeInclusive<u64>| {
        slope_fit(&xs.map(|x| (x as f64, count_sigma(k, &f, x) as f64)).collect::<Vec<_>>()).unwrap()
    };
    let sq = fit(&q, 10..=40);
    let si = fit(&gi, 2..=8);
    Line {
        id: 5,
        pass: exact && (sq - 5.0).abs() <= 0.15 && (si - 5.0).abs() <= 0.3,
        detail: format!("slope over Q {sq:.4}, over Q(i) {si:.4}; counts match enumeration: {exact}"),
    }
}

fn criterion_6() -> Line {
    let start = Instant::now();
    let q = FieldContext::rationals();
    let mut pairs = common::weak_pairs(11, 3, &[3, 5, 7, 15, 21], 50);
    pairs.extend(common::weak_pairs(13, 5, &[3, 5, 15], 50));
    let mut failures = 0;
    for (f, m) in &pairs {
        let mi = q.int(*m as i64);
        let ok = construct_orbit(&q, f, &mi).is_ok_and(|w| {
            let n = w.size() - 1;
            let mut sup = vec![q.int(1); n];
            sup[0] = mi.clone();
            sup[n - 1] = mi.clone();
            let cof = char_poly_cofactor(&q, &w.num);
            let dense_scaled: Vec<_> = (0..=w.size())
                .map(|j| {
                    let c = if j == w.size() { q.int(1) } else { f.coeffs[w.size() - 1 - j].clone() };
                    // x^j coefficient of det(x - num) equals b * den^(N-j)
                    let mut d = q.int(1);
                    for _ in j..w.size() {
                        d = q.ring().mul(&d, &w.den);
                    }
                    q.ring().mul(&c, &d)
                })
                .collect();
            w.is_quarter_integral(&q)
                && w.has_char_poly(&q, f)
                && cof == dense_scaled
                && w.superdiagonal(&q).as_ref() == Some(&sup)
                && q_invariant(&q, &w).ok() == Some(mi.clone())
        });
        failures += usize::from(!ok);
    }
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 6,
        pass: failures == 0 && pairs.len() == 100 && secs < 30.0,
        detail: format!("{} certified pairs (n = 3, 5), {failures} failures; {secs:.2}s", pairs.len()),
    }
}

fn scan_criteria() -> Vec<Line> {
    let q = FieldContext::rationals();
    let f = CurveFamily::new(DynkinType::a(2));
    let start = Instant::now();
    let report = scan(&q, &f, &ScanConfig { x: 15, prime_bound: 100, ..Default::default() }).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let euler = euler_product(&q, &f, 100).unwrap();
    let emp = report.empirical_density.unwrap();
    let diff = emp - euler.value;
    let c4 = Line {
        id: 4,
        pass: diff.abs() <= 0.02 + report.band && report.band <= 0.01,
        detail: format!(
            "empirical {emp:.4} vs Euler product {:.4}, difference {diff:.4}, band {:.4}, {} points; {secs:.1}s",
            euler.value, report.band, report.total
        ),
    };
    let p = |n: u64| q.primes_above(n).remove(0);
    let b = InvariantPoint::from_ints(&[-2, 4]);
    let pinned = classify(&q, &f, &b, &p(5)) == Ok(DivisibilityClass::Weak)
        && classify(&q, &f, &b, &p(2)) == Ok(DivisibilityClass::Strong)
        && classify_brute(&q, &f, &b, &p(5)) == Ok(DivisibilityClass::Weak)
        && classify_brute(&q, &f, &b, &p(2)) == Ok(DivisibilityClass::Strong);
    let checked: u64 = report.tallies.iter().filter(|t| t.norm <= 13).map(|t| t.brute_checked).sum();
    let c7 = Line {
        id: 7,
        pass: report.classifier_disagreements == 0 && pinned && checked > 0,
        detail: format!(
            "{} disagreements over {checked} divisible pairs with N p <= 13; pinned examples hold: {pinned}",
            report.classifier_disagreements
        ),
    };
    let grid = [10.0, 20.0, 40.0, 80.0, 160.0];
    let decay = decay_from_rows(report.tail_counts.iter().filter(|r| grid.contains(&r.m)).cloned().collect());
    let exponent = decay.combined_exponent.unwrap_or(f64::NAN);
    let c8 = Line {
        id: 8,
        pass: decay.monotone && exponent <= -0.4,
        detail: format!(
            "combined counts {:?}, fitted exponent {exponent:.3} (strong {:.3}, weak {:.3}), monotone {}",
            decay.rows.iter().map(|r| r.combined).collect::<Vec<_>>(),
            decay.strong_exponent.unwrap_or(f64::NAN),
            decay.weak_exponent.unwrap_or(f64::NAN),
            decay.monotone
        ),
    };
    vec![c4, c7, c8]
}

#[test]
fn acceptance() {
    let mut lines = vec![criterion_1(), criterion_2(), criterion_3(), criterion_5(), criterion_6()];
    lines.extend(scan_criteria());
    lines.sort_by_key(|l| l.id);
    // written to the process stdout so the lines survive libtest's capture
    let mut out = std::io::stdout().lock();
    for l in &lines {
        writeln!(out, "criterion {}: {} ({})", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail).unwrap();
    }
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
