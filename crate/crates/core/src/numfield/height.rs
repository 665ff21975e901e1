//! Heights of invariant points and the fundamental domain of the unit action.

use super::{FieldContext, Quad, QuadRing, RingInt};
use crate::arith::factor::{factor_u64, factor_with_budget};
use crate::arith::{Int, Ring};
use crate::curvefam::CurveFamily;
use crate::error::{AdeError, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// A point of the invariant space with coordinates ordered by degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantPoint {
    pub coords: Vec<RingInt>,
}

impl InvariantPoint {
    pub fn new(coords: Vec<RingInt>) -> Self {
        InvariantPoint { coords }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        InvariantPoint { coords: v.iter().map(|&a| Quad::from_i64(a, 0)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// `x^(1/d)` for a nonnegative integer, exact when `x` is a perfect power.
fn root_f64(x: &BigInt, d: u32) -> f64 {
    let xf = Int::to_f64(x);
    let r = xf.powf(1.0 / d as f64);
    let rr = r.round();
    if (0.0..1e15).contains(&rr) {
        let ri = BigInt::from(rr as i64);
        if Pow::pow(&ri, d) == *x {
            return rr;
        }
    }
    r
}

/// Archimedean height `max_i |p_i|_v^(1/d_i)`, with `|x|_v = N(x)` at a complex place.
pub fn height(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> f64 {
    b.coords.iter().zip(&family.degrees).map(|(c, &d)| root_f64(&ctx.abs_value(c), d)).fold(0.0, f64::max)
}

/// Exact test `Ht(b) < x` on the archimedean height.
pub fn height_below(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint, x: u64) -> bool {
    let xb = BigInt::from(x);
    b.coords.iter().zip(&family.degrees).all(|(c, &d)| ctx.abs_value(c) < Pow::pow(&xb, d))
}

/// `N I_b` for an integral point: `prod N p^(-min_i floor(v_p(p_i)/d_i))`.
pub fn norm_ideal_ib(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Result<BigRational> {
    if b.is_zero() {
        return Err(AdeError::ZeroPoint);
    }
    let g = norm_gcd(ctx.ring(), &b.coords);
    let mut out = BigRational::one();
    for p in rational_primes(&g.to_biguint().expect("gcd is nonnegative"))? {
        for prime in ctx.primes_above(p) {
            let k = b
                .coords
                .iter()
                .zip(&family.degrees)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, &d)| ctx.valuation(c, &prime).expect("nonzero") / d)
                .min()
                .expect("some coordinate is nonzero");
            if k > 0 {
                out /= BigRational::from_integer(Pow::pow(&BigInt::from(prime.norm), k));
            }
        }
    }
    Ok(out)
}

/// `N I_b * Ht(b)`, the height of the rescaled primitive point.
pub fn invariant_height(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Result<f64> {
    let ni = norm_ideal_ib(ctx, family, b)?;
    let nif = ToPrimitive::to_f64(&ni).unwrap_or(f64::NAN);
    Ok(nif * height(ctx, family, b))
}

fn norm_gcd<I: Int>(ring: &QuadRing<I>, coords: &[Quad<I>]) -> I {
    coords.iter().filter(|c| !c.is_zero()).fold(I::zero(), |g, c| g.gcd(&ring.abs_norm(c)))
}

fn rational_primes(g: &BigUint) -> Result<Vec<u64>> {
    if g.is_one() || g.is_zero() {
        return Ok(Vec::new());
    }
    if let Some(s) = g.to_u64() {
        return Ok(factor_u64(s).into_iter().map(|(p, _)| p).collect());
    }
    let f = factor_with_budget(g, &[], &BigUint::from(1u64 << 63));
    if !f.is_complete() {
        return Err(AdeError::FactorBudgetExceeded(f.cofactor.to_string()));
    }
    Ok(f.factors.into_iter().map(|(p, _)| p).collect())
}

/// Primitivity at every prime: no `p` has `v_p(p_i) >= d_i` for all `i`.
pub(crate) fn primitive_in<I: Int>(
    ctx: &FieldContext,
    ring: &QuadRing<I>,
    degrees: &[u32],
    coords: &[Quad<I>],
) -> bool {
    let g = norm_gcd(ring, coords);
    if g.is_zero() {
        return false;
    }
    if g.is_one() {
        return true;
    }
    let g = g.to_big().to_biguint().expect("gcd is nonnegative");
    let Ok(primes) = rational_primes(&g) else {
        // an unfactorable gcd is treated as a potential common factor
        return false;
    };
    for p in primes {
        for prime in ctx.primes_above(p) {
            let pi = Quad::<I>::from_big(&prime.generator).expect("generator fits backend");
            let all =
                coords.iter().zip(degrees).all(|(c, &d)| c.is_zero() || ring.div_exact(c, &ring.pow(&pi, d)).is_some());
            if all {
                return false;
            }
        }
    }
    true
}

pub fn is_primitive(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> bool {
    primitive_in(ctx, ctx.ring(), &family.degrees, &b.coords)
}

/// `u . b = (u^{d_i} p_i)`.
pub fn unit_action(ctx: &FieldContext, family: &CurveFamily, u: &RingInt, b: &InvariantPoint) -> InvariantPoint {
    let r = ctx.ring();
    InvariantPoint { coords: b.coords.iter().zip(&family.degrees).map(|(c, &d)| r.mul(&r.pow(u, d), c)).collect() }
}

/// The least element of the unit orbit of `b` in the lexicographic order.
pub fn canonical_representative(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> InvariantPoint {
    ctx.units()
        .iter()
        .map(|u| unit_action(ctx, family, u, b))
        .min_by(|x, y| x.coords.cmp(&y.coords))
        .expect("units are nonempty")
}

/// Precomputed `u^d` for every unit and degree, over a backend.
pub(crate) struct UnitPowers<I> {
    pub powers: Vec<Vec<Quad<I>>>,
}

impl<I: Int> UnitPowers<I> {
    pub fn new(ctx: &FieldContext, ring: &QuadRing<I>, degrees: &[u32]) -> Self {
        let powers = ctx
            .units()
            .iter()
            .skip(1)
            .map(|u| {
                let u = Quad::<I>::from_big(u).expect("units are small");
                degrees.iter().map(|&d| ring.pow(&u, d)).collect()
            })
            .collect();
        UnitPowers { powers }
    }

    /// Whether `coords` is the least point of its unit orbit.
    pub fn is_canonical(&self, ring: &QuadRing<I>, coords: &[Quad<I>]) -> bool {
        for up in &self.powers {
            for (c, u) in coords.iter().zip(up) {
                match ring.mul(u, c).cmp(c) {
                    Ordering::Less => return false,
                    Ordering::Greater => break,
                    Ordering::Equal => {}
                }
            }
        }
        true
    }
}

/// Membership in the fundamental domain: primitive at every prime and the
/// canonical representative of its unit orbit.
pub fn in_sigma(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Result<bool> {
    if b.is_zero() {
        return Err(AdeError::ZeroPoint);
    }
    if b.coords.len() != family.degrees.len() {
        return Err(AdeError::InvalidInput("point has the wrong number of coordinates".into()));
    }
    let up = UnitPowers::new(ctx, ctx.ring(), &family.degrees);
    Ok(up.is_canonical(ctx.ring(), &b.coords) && is_primitive(ctx, family, b))
}
