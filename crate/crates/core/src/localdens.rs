//! Local densities `rho_p`: the proportion of points of `B(O/p^2)` with
//! nonzero discriminant, and their truncated Euler product.

use crate::arith::factor::primes_up_to;
use crate::arith::Ring;
use crate::curvefam::{discriminant_a_in, expanded_discriminant, CurveFamily, MAX_A_RANK};
use crate::error::{AdeError, Result};
use crate::numfield::{FieldContext, PrimeIdeal, RingInt, SplitKind};
use crate::rootsys::Kind;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Default cap on the number of residue tuples visited by one density computation.
pub const DEFAULT_BUDGET: u128 = 400_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    /// `Z/q` with `w` mapped to `w`.
    Cyclic { w: u64 },
    /// `(Z/q)[w] / (w^2 - t w - n)`.
    Quadratic { t: u64, n: u64 },
}

/// The residue ring `O/p^2`, with elements stored as pairs `(a, b)` meaning `a + b*w`
/// (`b = 0` in the cyclic model).
#[derive(Clone, Debug)]
pub struct LocalRing {
    model: Model,
    /// Modulus of the coordinates.
    q: u64,
    p: u64,
    kind: SplitKind,
    /// `N p`.
    pub norm: u64,
    /// Image of the prime's generator.
    pub pi: [u64; 2],
}

fn modq(x: &BigInt, q: u64) -> u64 {
    let r = x % BigInt::from(q);
    let r = if r < BigInt::zero() { r + BigInt::from(q) } else { r };
    r.to_u64().expect("residue fits u64")
}

fn sqrt_mod_roots(t: i64, n: i64, p: u64) -> Vec<u64> {
    // roots of x^2 - t x - n mod p, by search
    let pi = p as i64;
    (0..p)
        .filter(|&x| {
            let x = x as i64;
            (x * x - t * x - n).rem_euclid(pi) == 0
        })
        .collect()
}

impl LocalRing {
    pub fn new(ctx: &FieldContext, prime: &PrimeIdeal) -> Self {
        let p = prime.p;
        let (t, n) = (ctx.ring().t, ctx.ring().n);
        let q2 = p * p;
        assert!(q2 < 1 << 31, "residue ring too large");
        let (model, q) = match prime.kind {
            SplitKind::Rational => (Model::Cyclic { w: 0 }, q2),
            SplitKind::Inert => {
                (Model::Quadratic { t: t.rem_euclid(q2 as i64) as u64, n: n.rem_euclid(q2 as i64) as u64 }, q2)
            }
            SplitKind::Ramified => {
                (Model::Quadratic { t: t.rem_euclid(p as i64) as u64, n: n.rem_euclid(p as i64) as u64 }, p)
            }
            SplitKind::Split => {
                // w -> the root r with a + b r = 0 mod p, Hensel-lifted to p^2
                let g = &prime.generator;
                let (ga, gb) = (modq(&g.a, p), modq(&g.b, p));
                let r = sqrt_mod_roots(t, n, p)
                    .into_iter()
                    .find(|&r| (ga + gb * r) % p == 0)
                    .expect("split prime has a matching root");
                let qi = q2 as i128;
                let f = |x: i128| (x * x - t as i128 * x - n as i128).rem_euclid(qi);
                let df = (2 * r as i128 - t as i128).rem_euclid(p as i128);
                // inverse of df mod p
                let inv = (1..p as i128).find(|k| (k * df) % p as i128 == 1).expect("unramified");
                let r2 = (r as i128 - f(r as i128) * inv).rem_euclid(qi);
                debug_assert_eq!(f(r2), 0);
                (Model::Cyclic { w: r2 as u64 }, q2)
            }
        };
        let mut ring = LocalRing { model, q, p, kind: prime.kind, norm: prime.norm, pi: [0, 0] };
        ring.pi = ring.reduce(&prime.generator);
        ring
    }

    pub fn reduce(&self, x: &RingInt) -> [u64; 2] {
        match self.model {
            Model::Cyclic { w } => {
                let a = modq(&x.a, self.q);
                let b = modq(&x.b, self.q);
                [(a + b * w) % self.q, 0]
            }
            Model::Quadratic { .. } => [modq(&x.a, self.q), modq(&x.b, self.q)],
        }
    }

    /// Whether `x` lies in `p`.
    pub fn in_prime(&self, x: &[u64; 2]) -> bool {
        let p = self.p;
        match (self.model, self.kind) {
            (Model::Cyclic { .. }, _) => x[0].is_multiple_of(p),
            (Model::Quadratic { .. }, SplitKind::Inert) => x[0].is_multiple_of(p) && x[1].is_multiple_of(p),
            (Model::Quadratic { t, n }, _) => {
                let (a, b) = (x[0] % p, x[1] % p);
                let (t, n) = (t % p, n % p);
                (a * a + t * a % p * b + (p - n) * b % p * b).is_multiple_of(p)
            }
        }
    }

    /// Representatives of `O/p`.
    pub fn residues_mod_prime(&self) -> Vec<[u64; 2]> {
        let p = self.p;
        match self.kind {
            SplitKind::Inert => (0..p).flat_map(|a| (0..p).map(move |b| [a, b])).collect(),
            _ => (0..p).map(|a| [a, 0]).collect(),
        }
    }

    /// All elements of `O/p^2`.
    pub fn elements(&self) -> Vec<[u64; 2]> {
        let q = self.q;
        match self.model {
            Model::Cyclic { .. } => (0..q).map(|a| [a, 0]).collect(),
            Model::Quadratic { .. } => (0..q).flat_map(|a| (0..q).map(move |b| [a, b])).collect(),
        }
    }

    /// A lift of `x` to `O`.
    pub fn lift(&self, x: &[u64; 2]) -> RingInt {
        crate::numfield::Quad::new(BigInt::from(x[0]), BigInt::from(x[1]))
    }
}

impl Ring for LocalRing {
    type Elem = [u64; 2];

    fn zero(&self) -> [u64; 2] {
        [0, 0]
    }
    fn one(&self) -> [u64; 2] {
        [1 % self.q, 0]
    }
    fn from_i64(&self, n: i64) -> [u64; 2] {
        [n.rem_euclid(self.q as i64) as u64, 0]
    }
    fn add(&self, x: &[u64; 2], y: &[u64; 2]) -> [u64; 2] {
        [(x[0] + y[0]) % self.q, (x[1] + y[1]) % self.q]
    }
    fn sub(&self, x: &[u64; 2], y: &[u64; 2]) -> [u64; 2] {
        [(x[0] + self.q - y[0]) % self.q, (x[1] + self.q - y[1]) % self.q]
    }
    fn mul(&self, x: &[u64; 2], y: &[u64; 2]) -> [u64; 2] {
        let q = self.q;
        match self.model {
            Model::Cyclic { .. } => [x[0] * y[0] % q, 0],
            Model::Quadratic { t, n } => {
                let bb = x[1] * y[1] % q;
                let a = (x[0] * y[0] + n * bb) % q;
                let b = (x[0] * y[1] + x[1] * y[0] + t * bb) % q;
                [a, b]
            }
        }
    }
    fn neg(&self, x: &[u64; 2]) -> [u64; 2] {
        [(self.q - x[0]) % self.q, (self.q - x[1]) % self.q]
    }
    fn is_zero(&self, x: &[u64; 2]) -> bool {
        x[0] == 0 && x[1] == 0
    }
    /// Division is only supported by one.
    fn div_exact(&self, x: &[u64; 2], y: &[u64; 2]) -> Option<[u64; 2]> {
        (*y == self.one()).then_some(*x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalDensity {
    pub prime: PrimeIdeal,
    #[serde(serialize_with = "crate::report::ser_big_rational")]
    pub rho: BigRational,
    pub total_count: u128,
    pub nonzero_count: u128,
}

impl LocalDensity {
    fn from_counts(prime: &PrimeIdeal, total: u128, zeros: u128) -> Self {
        let nonzero = total - zeros;
        LocalDensity {
            prime: prime.clone(),
            rho: BigRational::new(BigInt::from(nonzero), BigInt::from(total)),
            total_count: total,
            nonzero_count: nonzero,
        }
    }
}

fn check_family(family: &CurveFamily) -> Result<usize> {
    if family.dtype.kind != Kind::A || family.dtype.rank > MAX_A_RANK {
        return Err(AdeError::Unsupported(format!("no discriminant evaluator for {}", family.dtype)));
    }
    Ok(family.dtype.rank)
}

fn tuple_count(base: u128, r: usize) -> Option<u128> {
    base.checked_pow(r as u32)
}

/// Calls `f` on every `r`-tuple of `elems` whose first entry is `elems[lead]`.
fn for_each_tuple(elems: &[[u64; 2]], r: usize, lead: usize, mut f: impl FnMut(&[[u64; 2]])) {
    let mut idx = vec![0usize; r];
    idx[0] = lead;
    let mut cur: Vec<[u64; 2]> = idx.iter().map(|&i| elems[i]).collect();
    loop {
        f(&cur);
        let mut k = r - 1;
        loop {
            if k == 0 {
                return;
            }
            idx[k] += 1;
            if idx[k] < elems.len() {
                cur[k] = elems[idx[k]];
                break;
            }
            idx[k] = 0;
            cur[k] = elems[0];
            k -= 1;
        }
    }
}

/// Number of tuples in `(O/p^2)^r` with `Delta = 0 mod p^2`, by full enumeration.
pub fn count_zeros_brute(ctx: &FieldContext, family: &CurveFamily, prime: &PrimeIdeal, budget: u128) -> Result<u128> {
    let m = check_family(family)?;
    let lr = LocalRing::new(ctx, prime);
    let elems = lr.elements();
    let total = tuple_count(elems.len() as u128, m).filter(|&t| t <= budget);
    if total.is_none() {
        return Err(AdeError::BudgetExceeded(format!("(N p)^(2r) for N p = {}", prime.norm)));
    }
    let exp = expanded_discriminant(m);
    if exp.is_none() && total.unwrap() > budget / 100 {
        return Err(AdeError::BudgetExceeded("resultant enumeration".into()));
    }
    let zz = ctx.ring().clone();
    let zeros = (0..elems.len())
        .into_par_iter()
        .map(|lead| {
            let mut z = 0u128;
            for_each_tuple(&elems, m, lead, |c| {
                let d = match exp {
                    Some(e) => e.eval(&lr, c),
                    None => {
                        let lifts: Vec<RingInt> = c.iter().map(|x| lr.lift(x)).collect();
                        lr.reduce(&discriminant_a_in(&zz, &lifts))
                    }
                };
                if lr.is_zero(&d) {
                    z += 1;
                }
            });
            z
        })
        .sum();
    Ok(zeros)
}

/// The same count, iterating all but the last coordinate and counting lifts of
/// roots of the residual congruence in the constant term: a root `y0` mod `p`
/// contributes one lift when `dDelta/dy (y0)` is a unit, `N p` lifts when
/// `Delta(y0) = 0 mod p^2`, and none otherwise.
pub fn count_zeros_accelerated(
    ctx: &FieldContext,
    family: &CurveFamily,
    prime: &PrimeIdeal,
    budget: u128,
) -> Result<u128> {
    let m = check_family(family)?;
    let exp =
        expanded_discriminant(m).ok_or_else(|| AdeError::Unsupported(format!("no expanded discriminant for A{m}")))?;
    let lr = LocalRing::new(ctx, prime);
    let elems = lr.elements();
    let roots = lr.residues_mod_prime();
    let work = tuple_count(elems.len() as u128, m - 1).and_then(|t| t.checked_mul(roots.len() as u128));
    if work.is_none_or(|w| w > budget) {
        return Err(AdeError::BudgetExceeded(format!("accelerated count at N p = {}", prime.norm)));
    }
    let norm = prime.norm as u128;
    let per_prefix = |prefix: &[[u64; 2]]| {
        let mut pt: Vec<[u64; 2]> = prefix.to_vec();
        pt.push([0, 0]);
        let mut z = 0u128;
        for y in &roots {
            pt[m - 1] = *y;
            let g = exp.eval(&lr, &pt);
            if !lr.in_prime(&g) {
                continue;
            }
            let dg = exp.partial(&lr, &pt, m - 1);
            if !lr.in_prime(&dg) {
                z += 1;
            } else if lr.is_zero(&g) {
                z += norm;
            }
        }
        z
    };
    let zeros = (0..elems.len())
        .into_par_iter()
        .map(|lead| {
            let mut z = 0u128;
            for_each_tuple(&elems, m - 1, lead, |c| z += per_prefix(c));
            z
        })
        .sum();
    Ok(zeros)
}

fn total_points(prime: &PrimeIdeal, r: usize) -> u128 {
    (prime.norm as u128).pow(2 * r as u32)
}

/// `rho_p`, using the accelerated count where available.
pub fn local_density(ctx: &FieldContext, family: &CurveFamily, prime: &PrimeIdeal) -> Result<LocalDensity> {
    local_density_with(ctx, family, prime, DEFAULT_BUDGET)
}

pub fn local_density_with(
    ctx: &FieldContext,
    family: &CurveFamily,
    prime: &PrimeIdeal,
    budget: u128,
) -> Result<LocalDensity> {
    let m = check_family(family)?;
    let zeros = if expanded_discriminant(m).is_some() {
        count_zeros_accelerated(ctx, family, prime, budget)?
    } else {
        count_zeros_brute(ctx, family, prime, budget)?
    };
    Ok(LocalDensity::from_counts(prime, total_points(prime, m), zeros))
}

/// `rho_p` by full enumeration only.
pub fn local_density_brute(
    ctx: &FieldContext,
    family: &CurveFamily,
    prime: &PrimeIdeal,
    budget: u128,
) -> Result<LocalDensity> {
    let m = check_family(family)?;
    let zeros = count_zeros_brute(ctx, family, prime, budget)?;
    Ok(LocalDensity::from_counts(prime, total_points(prime, m), zeros))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerProduct {
    /// `prod_{N p <= P} rho_p`.
    pub value: f64,
    #[serde(serialize_with = "crate::report::ser_big_rational")]
    pub exact: BigRational,
    pub truncation_bound: u64,
    /// `max (1 - rho_p) (N p)^2` over the computed primes.
    pub tail_constant: f64,
    /// `value * (1 - prod_{N p > P} (1 - c/(N p)^2))`; heuristic, not a proven bound.
    pub tail_halfwidth: f64,
    /// The product with each factor divided by `1 - (N p)^(-sum d_i)`, the density
    /// of squarefree values among points primitive at `p`.
    pub primitive_corrected: f64,
    pub factors: Vec<LocalDensity>,
}

fn to_f64(x: &BigRational) -> f64 {
    ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Norms of prime ideals in `(lo, hi]`.
fn prime_norms_between(ctx: &FieldContext, lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in primes_up_to(hi) {
        if ctx.tag() == 0 {
            if p > lo {
                out.push(p);
            }
            continue;
        }
        match ctx.kronecker(p) {
            1 => {
                if p > lo {
                    out.extend([p, p]);
                }
            }
            0 => {
                if p > lo {
                    out.push(p);
                }
            }
            _ => {
                if let Some(n) = p.checked_mul(p).filter(|&n| n > lo && n <= hi) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// Upper limit of the explicit tail sum; beyond it `sum 2c/n^2 <= 2c/L`.
const TAIL_LIMIT: u64 = 2_000_000;

pub fn euler_product(ctx: &FieldContext, family: &CurveFamily, bound: u64) -> Result<EulerProduct> {
    let primes = ctx.primes_up_to_norm(bound);
    let factors = primes.iter().map(|p| local_density(ctx, family, p)).collect::<Result<Vec<_>>>()?;
    let exact = factors.iter().fold(BigRational::one(), |acc, f| acc * &f.rho);
    let value = to_f64(&exact);
    let c = factors
        .iter()
        .map(|f| to_f64(&(BigRational::one() - &f.rho)) * (f.prime.norm as f64).powi(2))
        .fold(0.0, f64::max);
    let limit = TAIL_LIMIT.max(bound);
    let mut s = 2.0 * c / limit as f64;
    for n in prime_norms_between(ctx, bound, limit) {
        let x = c / (n as f64).powi(2);
        s += -(1.0 - x.min(0.5)).ln();
    }
    let w = family.degree_sum() as i32;
    let correction: f64 = factors.iter().map(|f| 1.0 / (1.0 - (f.prime.norm as f64).powi(-w))).product();
    Ok(EulerProduct {
        value,
        exact,
        truncation_bound: bound,
        tail_constant: c,
        tail_halfwidth: value * (1.0 - (-s).exp()),
        primitive_corrected: value * correction,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::DynkinType;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn a2_small_primes() {
        let q = FieldContext::rationals();
        let f = CurveFamily::new(DynkinType::a(2));
        let p2 = &q.primes_above(2)[0];
        let p3 = &q.primes_above(3)[0];
        assert_eq!(local_density_brute(&q, &f, p2, DEFAULT_BUDGET).unwrap().rho, rat(1, 2));
        assert_eq!(local_density_brute(&q, &f, p3, DEFAULT_BUDGET).unwrap().rho, rat(2, 3));
        assert_eq!(local_density(&q, &f, p2).unwrap().rho, rat(1, 2));
        let e = euler_product(&q, &f, 3).unwrap();
        assert_eq!(e.exact, rat(1, 3));
    }

    #[test]
    fn accelerated_matches_brute_over_gaussian_integers() {
        let k = FieldContext::gaussian();
        let f = CurveFamily::new(DynkinType::a(2));
        for p in [2, 3, 5, 7] {
            for prime in k.primes_above(p) {
                let a = count_zeros_accelerated(&k, &f, &prime, DEFAULT_BUDGET).unwrap();
                let b = count_zeros_brute(&k, &f, &prime, DEFAULT_BUDGET).unwrap();
                assert_eq!(a, b, "{}", prime.label());
            }
        }
    }

    #[test]
    fn split_model_kills_the_generator_square() {
        let k = FieldContext::new(-7).unwrap();
        for prime in k.primes_above(2).into_iter().chain(k.primes_above(11)) {
            let lr = LocalRing::new(&k, &prime);
            let g2 = k.ring().mul(&prime.generator, &prime.generator);
            assert!(lr.is_zero(&lr.reduce(&g2)));
            assert!(lr.in_prime(&lr.pi));
            assert!(!lr.is_zero(&lr.pi));
        }
    }
}
