//! Prime ideals, valuations, residue systems and factorisation.

use super::{FieldContext, Quad, QuadRing, RingInt};
use crate::arith::factor::{factor_with_budget, primes_up_to};
use crate::arith::{Int, Ring};
use crate::error::{AdeError, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitKind {
    Rational,
    Split,
    Inert,
    Ramified,
}

/// A nonzero prime ideal, principal because the class number is one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdeal {
    /// The rational prime below.
    pub p: u64,
    /// `N p = #(O/p)`.
    pub norm: u64,
    #[serde(with = "super::as_string")]
    pub generator: RingInt,
    pub kind: SplitKind,
}

impl PrimeIdeal {
    pub fn label(&self) -> String {
        match self.kind {
            SplitKind::Rational | SplitKind::Inert => self.p.to_string(),
            _ => format!("({})", self.generator),
        }
    }
}

impl FieldContext {
    /// Kronecker symbol `(D/p)` of the field discriminant.
    pub fn kronecker(&self, p: u64) -> i32 {
        let disc = self.discriminant();
        if disc.rem_euclid(p as i64) == 0 {
            return 0;
        }
        if p == 2 {
            return if disc.rem_euclid(8) == 1 { 1 } else { -1 };
        }
        let a = disc.rem_euclid(p as i64) as u64;
        let mut acc = 1u128;
        let mut base = a as u128;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    /// An element of norm exactly `p`, if one exists.
    fn element_of_norm(&self, p: u64) -> Option<RingInt> {
        let r = self.ring();
        let dd = (-self.tag()) as u128;
        let p = p as u128;
        if r.t == 0 {
            let mut b = 0u128;
            while dd * b * b <= p {
                let rest = p - dd * b * b;
                let a = rest.sqrt();
                if a * a == rest {
                    return Some(Quad::new(BigInt::from(a), BigInt::from(b)));
                }
                b += 1;
            }
        } else {
            // 4p = (2a + b)^2 + |d| b^2
            let mut b = 0u128;
            while dd * b * b <= 4 * p {
                let rest = 4 * p - dd * b * b;
                let s = rest.sqrt();
                if s * s == rest && (s + b).is_multiple_of(2) {
                    let a = (s as i128 - b as i128) / 2;
                    return Some(Quad::new(BigInt::from(a), BigInt::from(b)));
                }
                b += 1;
            }
        }
        None
    }

    /// Largest associate of `x` in the `(a, b)` order, used to fix generators.
    pub fn normalize_generator(&self, x: &RingInt) -> RingInt {
        self.units().iter().map(|u| self.ring().mul(u, x)).max().expect("units are nonempty")
    }

    /// The prime ideals above the rational prime `p`, sorted by `(norm, generator)`.
    pub fn primes_above(&self, p: u64) -> Vec<PrimeIdeal> {
        if self.tag() == 0 {
            return vec![PrimeIdeal { p, norm: p, generator: self.int(p as i64), kind: SplitKind::Rational }];
        }
        match self.kronecker(p) {
            -1 => vec![PrimeIdeal {
                p,
                norm: p * p,
                generator: Quad::new(BigInt::from(p), BigInt::zero()),
                kind: SplitKind::Inert,
            }],
            0 => {
                let pi = self.element_of_norm(p).expect("ramified prime has an element of norm p");
                vec![PrimeIdeal { p, norm: p, generator: self.normalize_generator(&pi), kind: SplitKind::Ramified }]
            }
            _ => {
                let pi = self.element_of_norm(p).expect("split prime has an element of norm p");
                let g1 = self.normalize_generator(&pi);
                let g2 = self.normalize_generator(&self.conjugate(&pi));
                let mut v = vec![
                    PrimeIdeal { p, norm: p, generator: g1, kind: SplitKind::Split },
                    PrimeIdeal { p, norm: p, generator: g2, kind: SplitKind::Split },
                ];
                v.sort_by(|x, y| x.generator.cmp(&y.generator));
                v
            }
        }
    }

    /// All prime ideals of norm at most `bound`, sorted by `(norm, generator)`.
    pub fn primes_up_to_norm(&self, bound: u64) -> Vec<PrimeIdeal> {
        let mut out: Vec<PrimeIdeal> =
            primes_up_to(bound).into_iter().flat_map(|p| self.primes_above(p)).filter(|q| q.norm <= bound).collect();
        out.sort_by(|x, y| x.norm.cmp(&y.norm).then_with(|| x.generator.cmp(&y.generator)));
        out
    }

    /// `v_p(x)`, `None` for `x = 0`.
    pub fn valuation(&self, x: &RingInt, prime: &PrimeIdeal) -> Option<u32> {
        valuation_in(self.ring(), x, &prime.generator)
    }

    pub fn ideal_lattice(&self, g: &RingInt) -> IdealLattice {
        IdealLattice::new(self, g)
    }
}

/// `v_pi(x)` over any integer backend, `None` for `x = 0`.
pub fn valuation_in<I: Int>(ring: &QuadRing<I>, x: &Quad<I>, pi: &Quad<BigInt>) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pi = Quad::<I>::from_big(pi).expect("generator fits the backend");
    let mut v = 0;
    let mut y = x.clone();
    while let Some(q) = ring.div_exact(&y, &pi) {
        y = q;
        v += 1;
    }
    Some(v)
}

/// A principal ideal as a sublattice of `Z^2` in Hermite form with basis
/// `(A, 0)` and `(B, C)`; `x + y*w` with `0 <= x < A`, `0 <= y < C` is a
/// complete residue system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealLattice {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl IdealLattice {
    pub fn new(ctx: &FieldContext, g: &RingInt) -> Self {
        let g = Quad::<i128>::from_big(g).expect("ideal generator fits 128 bits");
        if ctx.tag() == 0 {
            return IdealLattice { a: g.a.abs(), b: 0, c: 1 };
        }
        let ring = ctx.small_ring();
        let u = g.clone();
        let w = ring.mul(&g, &Quad::from_i64(0, 1));
        let e = u.b.extended_gcd(&w.b);
        let c = e.gcd;
        let (x, y) = if c < 0 { (-e.x, -e.y) } else { (e.x, e.y) };
        let c = c.abs();
        let b_first = x * u.a + y * w.a;
        let a = ((w.b / c) * u.a - (u.b / c) * w.a).abs();
        IdealLattice { a, b: b_first.rem_euclid(a), c }
    }

    /// Index of the lattice, the norm of the ideal.
    pub fn index(&self) -> i128 {
        self.a * self.c
    }

    /// The canonical residue of `x`.
    pub fn reduce<I: Int>(&self, x: &Quad<I>) -> Quad<I> {
        let c = I::from_big(&BigInt::from(self.c)).expect("lattice fits backend");
        let a = I::from_big(&BigInt::from(self.a)).expect("lattice fits backend");
        let b = I::from_big(&BigInt::from(self.b)).expect("lattice fits backend");
        let k = x.b.div_floor(&c);
        let nb = x.b.csub(&k.cmul(&c));
        let na = x.a.csub(&k.cmul(&b)).mod_floor(&a);
        Quad { a: na, b: nb }
    }

    /// Residue representatives in lexicographic order.
    pub fn residues(&self) -> Vec<Quad<i128>> {
        let mut out = Vec::with_capacity(self.index() as usize);
        for y in 0..self.c {
            for x in 0..self.a {
                out.push(Quad { a: x, b: y });
            }
        }
        out
    }
}

/// Factorisation of a ring integer into prime ideals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorOutcome {
    pub factors: Vec<(PrimeIdeal, u32)>,
    /// Part of `|N(x)|` left unfactored (1 when complete).
    pub cofactor_norm: BigUint,
    /// The unfactored part is a probable prime, so it contributes exponent one.
    pub cofactor_is_prime: bool,
}

impl FactorOutcome {
    pub fn is_complete(&self) -> bool {
        self.cofactor_norm.is_one()
    }

    pub fn decides_squarefree(&self) -> bool {
        self.is_complete() || self.cofactor_is_prime
    }
}

/// Factors `x` by trial division over `trial` (rational primes) followed by
/// complete factorisation of a cofactor no larger than `budget`.
pub fn factor_with(ctx: &FieldContext, x: &RingInt, trial: &[u64], budget: &BigUint) -> Result<FactorOutcome> {
    if x.is_zero() {
        return Err(AdeError::InvalidInput("cannot factor zero".into()));
    }
    let n = ctx.abs_norm(x);
    let n = n.to_biguint().expect("absolute norm is nonnegative");
    let fac = factor_with_budget(&n, trial, budget);
    let mut factors = Vec::new();
    for (p, e) in fac.factors {
        for prime in ctx.primes_above(p) {
            let v = match prime.kind {
                SplitKind::Rational | SplitKind::Ramified => e,
                SplitKind::Inert => e / 2,
                SplitKind::Split => ctx.valuation(x, &prime).expect("x is nonzero"),
            };
            if v > 0 {
                factors.push((prime, v));
            }
        }
    }
    Ok(FactorOutcome { factors, cofactor_norm: fac.cofactor, cofactor_is_prime: fac.cofactor_is_prime })
}

/// Default budget for the unfactored cofactor.
pub fn default_budget() -> BigUint {
    BigUint::from(1u64 << 63)
}

fn default_trial() -> &'static [u64] {
    use std::sync::OnceLock;
    static TRIAL: OnceLock<Vec<u64>> = OnceLock::new();
    TRIAL.get_or_init(|| primes_up_to(1000))
}

/// Complete factorisation of `(x)` as prime ideals with exponents.
pub fn factor(ctx: &FieldContext, x: &RingInt) -> Result<Vec<(PrimeIdeal, u32)>> {
    let out = factor_with(ctx, x, default_trial(), &default_budget())?;
    if !out.is_complete() {
        if out.cofactor_is_prime {
            return Err(AdeError::FactorBudgetExceeded(format!(
                "{} (probable prime beyond 64 bits)",
                out.cofactor_norm
            )));
        }
        return Err(AdeError::FactorBudgetExceeded(out.cofactor_norm.to_string()));
    }
    Ok(out.factors)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquarefreeProfile {
    pub squarefree: bool,
    pub offending_primes: Vec<PrimeIdeal>,
}

pub fn squarefree_profile(ctx: &FieldContext, x: &RingInt) -> Result<SquarefreeProfile> {
    let out = factor_with(ctx, x, default_trial(), &default_budget())?;
    if !out.decides_squarefree() {
        return Err(AdeError::FactorBudgetExceeded(out.cofactor_norm.to_string()));
    }
    let offending_primes: Vec<PrimeIdeal> = out.factors.into_iter().filter(|(_, e)| *e >= 2).map(|(p, _)| p).collect();
    Ok(SquarefreeProfile { squarefree: offending_primes.is_empty(), offending_primes })
}
