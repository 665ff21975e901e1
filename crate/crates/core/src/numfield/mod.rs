//! Base fields: the rationals and imaginary quadratic fields of class number one.
//!
//! Ring integers are pairs `(a, b)` meaning `a + b*w` where `w = sqrt(d)` for
//! `d = 2, 3 mod 4` and `w = (1 + sqrt(d))/2` for `d = 1 mod 4`. Over the
//! rationals `b` is always zero.

mod height;
mod prime;
mod table;

pub use height::{
    canonical_representative, height, height_below, in_sigma, invariant_height, is_primitive, norm_ideal_ib,
    unit_action, InvariantPoint,
};
pub(crate) use height::{primitive_in, UnitPowers};
pub use prime::{
    factor, factor_with, squarefree_profile, FactorOutcome, IdealLattice, PrimeIdeal, SplitKind, SquarefreeProfile,
};
pub use table::{cache_dir, load_or_build_table, read_table, write_table, PrimeTable};

use crate::arith::{Int, Ring};
use crate::error::{AdeError, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Tags of the imaginary quadratic fields with class number one.
pub const CLASS_NUMBER_ONE: [i64; 9] = [-1, -2, -3, -7, -11, -19, -43, -67, -163];

/// An element `a + b*w` of a quadratic order, over an integer backend.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Quad<I> {
    pub a: I,
    pub b: I,
}

/// Exact ring integer of the base field.
pub type RingInt = Quad<BigInt>;

impl<I: Int> Quad<I> {
    pub fn new(a: I, b: I) -> Self {
        Quad { a, b }
    }

    pub fn from_i64(a: i64, b: i64) -> Self {
        Quad { a: I::from_i64(a), b: I::from_i64(b) }
    }

    pub fn rational(a: I) -> Self {
        Quad { a, b: I::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_big(&self) -> RingInt {
        Quad { a: self.a.to_big(), b: self.b.to_big() }
    }

    pub fn from_big(x: &RingInt) -> Option<Self> {
        Some(Quad { a: I::from_big(&x.a)?, b: I::from_big(&x.b)? })
    }
}

impl<I: Int> PartialOrd for Quad<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The fixed total order used to pick canonical representatives: `a` first, then `b`.
impl<I: Int> Ord for Quad<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a.cmp(&other.a).then_with(|| self.b.cmp(&other.b))
    }
}

impl FromStr for RingInt {
    type Err = AdeError;

    fn from_str(s: &str) -> Result<RingInt> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || AdeError::InvalidInput(format!("cannot parse ring element {s:?}"));
        let int = |u: &str| u.parse::<BigInt>().map_err(|_| bad());
        let coef = |u: &str| match u {
            "" | "+" => Ok(BigInt::one()),
            "-" => Ok(-BigInt::one()),
            _ => int(u),
        };
        Ok(match t.strip_suffix('w') {
            None => Quad::rational(int(&t)?),
            Some(head) => match head.rfind(['+', '-']).filter(|&i| i > 0) {
                Some(i) => Quad::new(int(&head[..i])?, coef(&head[i..])?),
                None => Quad::new(BigInt::zero(), coef(head)?),
            },
        })
    }
}

/// Serde adapter writing a ring element in its `Display` form.
pub(crate) mod as_string {
    use super::RingInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &RingInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RingInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl fmt::Display for RingInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}w", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}-{}w", self.a, -&self.b)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}

/// Arithmetic in the ring of integers, generic over the integer backend.
///
/// `w^2 = t*w + n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadRing<I> {
    pub d: i64,
    pub t: i64,
    pub n: i64,
    _int: std::marker::PhantomData<I>,
}

impl<I: Int> QuadRing<I> {
    pub fn new(d: i64) -> Self {
        let (t, n) = if d == 0 {
            (0, 0)
        } else if d.rem_euclid(4) == 1 {
            (1, (d - 1) / 4)
        } else {
            (0, d)
        };
        QuadRing { d, t, n, _int: std::marker::PhantomData }
    }

    /// Field norm `N_{F/Q}`; over the rationals this is the element itself.
    pub fn norm(&self, x: &Quad<I>) -> I {
        if self.d == 0 {
            return x.a.clone();
        }
        let t = I::from_i64(self.t);
        let n = I::from_i64(self.n);
        x.a.cmul(&x.a).cadd(&t.cmul(&x.a).cmul(&x.b)).csub(&n.cmul(&x.b).cmul(&x.b))
    }

    /// Absolute norm `|N(x)|`, the size of `O/(x)`.
    pub fn abs_norm(&self, x: &Quad<I>) -> I {
        self.norm(x).abs()
    }

    pub fn conjugate(&self, x: &Quad<I>) -> Quad<I> {
        if self.d == 0 {
            return x.clone();
        }
        let t = I::from_i64(self.t);
        Quad { a: x.a.cadd(&t.cmul(&x.b)), b: I::zero().csub(&x.b) }
    }

    pub fn element(&self, a: i64, b: i64) -> Quad<I> {
        Quad::from_i64(a, b)
    }
}

impl<I: Int> Ring for QuadRing<I> {
    type Elem = Quad<I>;

    fn zero(&self) -> Quad<I> {
        Quad { a: I::zero(), b: I::zero() }
    }
    fn one(&self) -> Quad<I> {
        Quad { a: I::one(), b: I::zero() }
    }
    fn from_i64(&self, n: i64) -> Quad<I> {
        Quad::rational(I::from_i64(n))
    }
    fn add(&self, x: &Quad<I>, y: &Quad<I>) -> Quad<I> {
        Quad { a: x.a.cadd(&y.a), b: x.b.cadd(&y.b) }
    }
    fn sub(&self, x: &Quad<I>, y: &Quad<I>) -> Quad<I> {
        Quad { a: x.a.csub(&y.a), b: x.b.csub(&y.b) }
    }
    fn mul(&self, x: &Quad<I>, y: &Quad<I>) -> Quad<I> {
        if x.b.is_zero() && y.b.is_zero() {
            return Quad { a: x.a.cmul(&y.a), b: I::zero() };
        }
        let bb = x.b.cmul(&y.b);
        let a = x.a.cmul(&y.a).cadd(&bb.cmul(&I::from_i64(self.n)));
        let b = x.a.cmul(&y.b).cadd(&x.b.cmul(&y.a)).cadd(&bb.cmul(&I::from_i64(self.t)));
        Quad { a, b }
    }
    fn neg(&self, x: &Quad<I>) -> Quad<I> {
        Quad { a: I::zero().csub(&x.a), b: I::zero().csub(&x.b) }
    }
    fn is_zero(&self, x: &Quad<I>) -> bool {
        x.is_zero()
    }
    fn div_exact(&self, x: &Quad<I>, y: &Quad<I>) -> Option<Quad<I>> {
        if y.is_zero() {
            return x.is_zero().then(|| self.zero());
        }
        if y.b.is_zero() {
            let (qa, ra) = x.a.div_rem(&y.a);
            let (qb, rb) = x.b.div_rem(&y.a);
            return (ra.is_zero() && rb.is_zero()).then_some(Quad { a: qa, b: qb });
        }
        let num = self.mul(x, &self.conjugate(y));
        let den = self.norm(y);
        let (qa, ra) = num.a.div_rem(&den);
        let (qb, rb) = num.b.div_rem(&den);
        (ra.is_zero() && rb.is_zero()).then_some(Quad { a: qa, b: qb })
    }
}

/// The base field `F`: the rationals (tag 0) or `Q(sqrt(d))` with class number one.
#[derive(Clone, Debug)]
pub struct FieldContext {
    tag: i64,
    ring: QuadRing<BigInt>,
    units: Vec<RingInt>,
}

impl FieldContext {
    pub fn rationals() -> Self {
        Self::new(0).expect("rationals are always supported")
    }

    pub fn gaussian() -> Self {
        Self::new(-1).expect("Q(i) is supported")
    }

    pub fn new(tag: i64) -> Result<Self> {
        if tag != 0 && !CLASS_NUMBER_ONE.contains(&tag) {
            return Err(AdeError::UnsupportedField(tag.to_string()));
        }
        let ring = QuadRing::new(tag);
        let units = match tag {
            0 => vec![Quad::from_i64(1, 0), Quad::from_i64(-1, 0)],
            -1 => vec![Quad::from_i64(1, 0), Quad::from_i64(0, 1), Quad::from_i64(-1, 0), Quad::from_i64(0, -1)],
            // w = (1 + sqrt(-3))/2 is a primitive sixth root of unity
            -3 => vec![
                Quad::from_i64(1, 0),
                Quad::from_i64(0, 1),
                Quad::from_i64(-1, 1),
                Quad::from_i64(-1, 0),
                Quad::from_i64(0, -1),
                Quad::from_i64(1, -1),
            ],
            _ => vec![Quad::from_i64(1, 0), Quad::from_i64(-1, 0)],
        };
        Ok(FieldContext { tag, ring, units })
    }

    /// Parses `Q`, `Q(i)`, `Q(sqrt-2)`, `Q(sqrt(-7))` and similar spellings.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let tag = match t.as_str() {
            "q" | "qq" | "rationals" => 0,
            "q(i)" | "gaussian" | "q(sqrt-1)" | "q(sqrt(-1))" => -1,
            _ => {
                let inner = t
                    .strip_prefix("q(sqrt")
                    .and_then(|r| r.strip_suffix(')'))
                    .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
                    .ok_or_else(|| AdeError::UnsupportedField(s.to_string()))?;
                inner.parse::<i64>().map_err(|_| AdeError::UnsupportedField(s.to_string()))?
            }
        };
        Self::new(tag)
    }

    /// 0 for the rationals, otherwise `d`.
    pub fn tag(&self) -> i64 {
        self.tag
    }

    pub fn name(&self) -> String {
        match self.tag {
            0 => "Q".to_string(),
            -1 => "Q(i)".to_string(),
            d => format!("Q(sqrt{d})"),
        }
    }

    /// `[F:Q]`.
    pub fn degree(&self) -> u32 {
        if self.tag == 0 {
            1
        } else {
            2
        }
    }

    /// Field discriminant (1 for the rationals).
    pub fn discriminant(&self) -> i64 {
        match self.tag {
            0 => 1,
            d if d.rem_euclid(4) == 1 => d,
            d => 4 * d,
        }
    }

    pub fn ring(&self) -> &QuadRing<BigInt> {
        &self.ring
    }

    /// The same ring over checked 128-bit coordinates.
    pub fn small_ring(&self) -> QuadRing<i128> {
        QuadRing::new(self.tag)
    }

    pub fn units(&self) -> &[RingInt] {
        &self.units
    }

    /// Multiplicative order of each unit, in the order of [`FieldContext::units`].
    pub fn unit_orders(&self) -> Vec<u32> {
        self.units
            .iter()
            .map(|u| {
                let mut x = u.clone();
                let mut k = 1;
                while x != self.ring.one() {
                    x = self.ring.mul(&x, u);
                    k += 1;
                }
                k
            })
            .collect()
    }

    pub fn int(&self, a: i64) -> RingInt {
        Quad::from_i64(a, 0)
    }

    pub fn element(&self, a: i64, b: i64) -> Result<RingInt> {
        if self.tag == 0 && b != 0 {
            return Err(AdeError::InvalidInput("rational integers have no w-part".into()));
        }
        Ok(Quad::from_i64(a, b))
    }

    /// Parses `a`, `bw`, `a+bw` or `a-bw`, the form used by `Display`.
    pub fn parse_element(&self, s: &str) -> Result<RingInt> {
        let x: RingInt = s.parse()?;
        if self.tag == 0 && !x.b.is_zero() {
            return Err(AdeError::InvalidInput("rational integers have no w-part".into()));
        }
        Ok(x)
    }

    pub fn norm(&self, x: &RingInt) -> BigInt {
        self.ring.norm(x)
    }

    pub fn abs_norm(&self, x: &RingInt) -> BigInt {
        self.ring.abs_norm(x)
    }

    pub fn conjugate(&self, x: &RingInt) -> RingInt {
        self.ring.conjugate(x)
    }

    pub fn div_exact(&self, x: &RingInt, y: &RingInt) -> Option<RingInt> {
        self.ring.div_exact(x, y)
    }

    /// Normalised archimedean absolute value: `|x|` over Q, `N(x)` at the complex place.
    pub fn abs_value(&self, x: &RingInt) -> BigInt {
        if self.tag == 0 {
            x.a.abs()
        } else {
            self.ring.norm(x)
        }
    }

    /// Complex embedding of `x` as `(re, im)`.
    pub fn embed(&self, x: &RingInt) -> (f64, f64) {
        let a = Int::to_f64(&x.a);
        let b = Int::to_f64(&x.b);
        match self.tag {
            0 => (a, 0.0),
            d if d.rem_euclid(4) == 1 => (a + b / 2.0, b * (-(d as f64)).sqrt() / 2.0),
            d => (a, b * (-(d as f64)).sqrt()),
        }
    }

    /// Euclidean division with `N(r) < N(y)`, available for norm-Euclidean fields.
    pub fn div_rem_euclid(&self, x: &RingInt, y: &RingInt) -> Result<(RingInt, RingInt)> {
        if y.is_zero() {
            return Err(AdeError::InvalidInput("division by zero".into()));
        }
        if self.tag == 0 {
            use num_integer::Integer;
            let (q, r) = x.a.div_mod_floor(&y.a);
            return Ok((Quad::rational(q), Quad::rational(r)));
        }
        if ![-1, -2, -3, -7, -11].contains(&self.tag) {
            return Err(AdeError::Unsupported(format!("{} is not norm-Euclidean", self.name())));
        }
        let num = self.ring.mul(x, &self.conjugate(y));
        let den = self.norm(y);
        let fa = num_integer::Integer::div_floor(&num.a, &den);
        let fb = num_integer::Integer::div_floor(&num.b, &den);
        let ny = self.norm(y);
        let mut best: Option<(BigInt, RingInt, RingInt)> = None;
        for da in -1i64..=2 {
            for db in -1i64..=2 {
                let q = Quad { a: &fa + da, b: &fb + db };
                let r = self.ring.sub(x, &self.ring.mul(&q, y));
                let nr = self.norm(&r);
                if best.as_ref().is_none_or(|(n, _, _)| &nr < n) {
                    best = Some((nr, q, r));
                }
            }
        }
        let (nr, q, r) = best.expect("candidate set is nonempty");
        debug_assert!(nr < ny);
        Ok((q, r))
    }

    /// Extended gcd: `(g, s, t)` with `s*x + t*y = g`.
    pub fn xgcd(&self, x: &RingInt, y: &RingInt) -> Result<(RingInt, RingInt, RingInt)> {
        let r = &self.ring;
        let (mut r0, mut r1) = (x.clone(), y.clone());
        let (mut s0, mut s1) = (r.one(), r.zero());
        let (mut t0, mut t1) = (r.zero(), r.one());
        while !r1.is_zero() {
            let (q, rem) = self.div_rem_euclid(&r0, &r1)?;
            r0 = std::mem::replace(&mut r1, rem);
            let s2 = r.sub(&s0, &r.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = r.sub(&t0, &r.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        Ok((r0, s0, t0))
    }

    pub fn is_unit(&self, x: &RingInt) -> bool {
        self.abs_norm(x).is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_units_have_norm_one() {
        let k = FieldContext::new(-3).unwrap();
        for u in k.units() {
            assert!(k.is_unit(u));
        }
        assert_eq!(k.unit_orders(), vec![1, 6, 3, 2, 3, 6]);
    }

    #[test]
    fn parse_spellings() {
        assert_eq!(FieldContext::parse("Q").unwrap().tag(), 0);
        assert_eq!(FieldContext::parse("Q(i)").unwrap().tag(), -1);
        assert_eq!(FieldContext::parse("Q(sqrt-2)").unwrap().tag(), -2);
        assert_eq!(FieldContext::parse("Q(sqrt(-163))").unwrap().tag(), -163);
        assert!(FieldContext::parse("Q(sqrt-5)").is_err());
    }

    #[test]
    fn euclidean_division_shrinks_norm() {
        for tag in [-1, -2, -3, -7, -11] {
            let k = FieldContext::new(tag).unwrap();
            for (a, b, c, e) in [(17, 5, 3, 2), (-40, 13, 2, -7), (5, 0, 1, 1)] {
                let x = k.element(a, b).unwrap();
                let y = k.element(c, e).unwrap();
                let (q, r) = k.div_rem_euclid(&x, &y).unwrap();
                assert_eq!(k.ring().add(&k.ring().mul(&q, &y), &r), x);
                assert!(k.norm(&r) < k.norm(&y));
            }
        }
    }
}
