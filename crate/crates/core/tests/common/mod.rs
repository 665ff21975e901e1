#![allow(dead_code)]

use ade_core::arith::factor::factor_u64;
use ade_core::numfield::{FieldContext, Quad};
use ade_core::orbits::MonicPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Whether `p^2 | disc(f + p c)` fails for some `c` in `(Z/p)^(n+1)`, given `p^2 | disc(f)`.
pub fn weak_by_enumeration(ctx: &FieldContext, f: &MonicPoly, p: u64) -> bool {
    let p2 = BigInt::from(p * p);
    if !f.discriminant(ctx).a.is_multiple_of(&p2) {
        return false;
    }
    let n = f.degree();
    let mut c = vec![0u64; n];
    loop {
        let g = MonicPoly::new(f.coeffs.iter().zip(&c).map(|(b, &ci)| Quad::rational(&b.a + p * ci)).collect());
        if !g.discriminant(ctx).a.is_multiple_of(&p2) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            c[k] += 1;
            if c[k] < p {
                break;
            }
            c[k] = 0;
            k += 1;
        }
    }
}

/// Random monic `f` of degree `n + 1` over `Z` with `m^2` weakly dividing
/// `disc(f)` at every prime of `m`, certified by enumeration.
pub fn weak_pairs(seed: u64, n: usize, moduli: &[u64], count: usize) -> Vec<(MonicPoly, u64)> {
    let ctx = FieldContext::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let m = moduli[rng.gen_range(0..moduli.len())] as i64;
        let r: i64 = rng.gen_range(-10..=10);
        // (x - r)^2 h(x) + m a (x - r) + m^2 c, low degree first
        let mut h: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-6..=6)).collect();
        h.push(1);
        let sq = [r * r, -2 * r, 1];
        let mut f = vec![0i64; n + 2];
        for (i, hi) in h.iter().enumerate() {
            for (j, s) in sq.iter().enumerate() {
                f[i + j] += hi * s;
            }
        }
        let a: i64 = rng.gen_range(-3..=3);
        let c: i64 = rng.gen_range(-3..=3);
        f[1] += m * a;
        f[0] += -m * a * r + m * m * c;
        let poly = MonicPoly::from_ints(&f[..n + 1].iter().rev().cloned().collect::<Vec<_>>());
        if poly.discriminant(&ctx).is_zero() {
            continue;
        }
        if factor_u64(m as u64).iter().all(|&(p, _)| weak_by_enumeration(&ctx, &poly, p)) {
            out.push((poly, m as u64));
        }
    }
    out
}
