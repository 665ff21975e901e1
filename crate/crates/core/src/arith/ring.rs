//! Commutative rings with exact division.
//!
//! Rings are passed as context objects so the same generic routines
//! (resultants, determinants, polynomial evaluation) run over machine
//! integers, big integers and quadratic integer rings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive};
use std::fmt::Debug;
use std::hash::Hash;

/// An integral domain in which exact division can be decided.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    /// Returns `q` with `x = q * y`, or `None` when `y` does not divide `x`.
    fn div_exact(&self, x: &Self::Elem, y: &Self::Elem) -> Option<Self::Elem>;

    fn pow(&self, x: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn mul_i64(&self, x: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(x, &self.from_i64(n))
    }

    fn divides(&self, y: &Self::Elem, x: &Self::Elem) -> bool {
        self.div_exact(x, y).is_some()
    }
}

/// Integer backends usable as coordinates of ring elements.
///
/// Arithmetic is overflow-checked: fixed-width backends panic instead of
/// wrapping, so a too-small backend fails loudly.
pub trait Int:
    Clone + Eq + Ord + Hash + Debug + Send + Sync + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + 'static
{
    fn from_i64(n: i64) -> Self;
    fn to_big(&self) -> BigInt;
    fn from_big(n: &BigInt) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn cadd(&self, o: &Self) -> Self {
        self.checked_add(o).expect("integer overflow in fixed-width ring")
    }
    fn csub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("integer overflow in fixed-width ring")
    }
    fn cmul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("integer overflow in fixed-width ring")
    }
}

impl Int for i128 {
    fn from_i64(n: i64) -> Self {
        n as i128
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(n: &BigInt) -> Option<Self> {
        n.to_i128()
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Int for BigInt {
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(n: &BigInt) -> Option<Self> {
        Some(n.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
    fn cadd(&self, o: &Self) -> Self {
        self + o
    }
    fn csub(&self, o: &Self) -> Self {
        self - o
    }
    fn cmul(&self, o: &Self) -> Self {
        self * o
    }
}

/// The ring of rational integers over a chosen backend.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntRing<I>(std::marker::PhantomData<I>);

impl<I> IntRing<I> {
    pub fn new() -> Self {
        IntRing(std::marker::PhantomData)
    }
}

pub type ZZ = IntRing<BigInt>;

impl<I: Int> Ring for IntRing<I> {
    type Elem = I;

    fn zero(&self) -> I {
        I::zero()
    }
    fn one(&self) -> I {
        I::one()
    }
    fn from_i64(&self, n: i64) -> I {
        I::from_i64(n)
    }
    fn add(&self, x: &I, y: &I) -> I {
        x.cadd(y)
    }
    fn sub(&self, x: &I, y: &I) -> I {
        x.csub(y)
    }
    fn mul(&self, x: &I, y: &I) -> I {
        x.cmul(y)
    }
    fn neg(&self, x: &I) -> I {
        I::zero().csub(x)
    }
    fn is_zero(&self, x: &I) -> bool {
        x.is_zero()
    }
    fn div_exact(&self, x: &I, y: &I) -> Option<I> {
        if y.is_zero() {
            return if x.is_zero() { Some(I::zero()) } else { None };
        }
        let (q, r) = x.div_rem(y);
        r.is_zero().then_some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_and_exact_division() {
        let r = IntRing::<i128>::new();
        assert_eq!(r.pow(&3, 5), 243);
        assert_eq!(r.div_exact(&243, &-3), Some(-81));
        assert_eq!(r.div_exact(&10, &3), None);
        assert_eq!(r.div_exact(&0, &0), Some(0));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn fixed_width_overflow_is_loud() {
        let r = IntRing::<i128>::new();
        r.pow(&10, 40);
    }
}
