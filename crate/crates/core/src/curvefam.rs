//! Curve families over the invariant space and their discriminants.

use crate::arith::mpoly::{MPoly, MPolyRing};
use crate::arith::resultant::monic_discriminant;
use crate::arith::Ring;
use crate::error::{AdeError, Result};
use crate::numfield::{FieldContext, InvariantPoint, Quad, RingInt};
use crate::rootsys::{DynkinType, Kind};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use std::sync::OnceLock;

/// Largest `A` rank for which discriminants are evaluated.
pub const MAX_A_RANK: usize = 10;
/// Largest `A` rank with a precomputed expanded discriminant.
pub const MAX_EXPANDED_RANK: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveFamily {
    #[serde(rename = "type")]
    pub dtype: DynkinType,
    /// Weights `d_i` of the coordinates `p_{d_i}`, ascending.
    pub degrees: Vec<u32>,
    pub equation: String,
    /// Weighted degree of the discriminant, `#Phi_H`.
    pub disc_degree: u32,
}

fn monomial(coef: Option<u32>, var: &str, e: u32) -> String {
    let c = coef.map(|d| format!("p{d}"));
    let x = match e {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{e}")),
    };
    match (c, x) {
        (Some(c), Some(x)) => format!("{c}*{x}"),
        (Some(c), None) => c,
        (None, Some(x)) => x,
        (None, None) => "1".into(),
    }
}

/// `x^top + sum p_{d} x^{e}` for the listed `(d, e)`.
fn rhs(top: u32, terms: impl Iterator<Item = (u32, u32)>) -> String {
    std::iter::once(monomial(None, "x", top))
        .chain(terms.map(|(d, e)| monomial(Some(d), "x", e)))
        .collect::<Vec<_>>()
        .join(" + ")
}

impl CurveFamily {
    pub fn new(t: DynkinType) -> Self {
        let r = t.rank as u32;
        let (mut degrees, equation): (Vec<u32>, String) = match (t.kind, r) {
            (Kind::A, _) => {
                let n = r + 1;
                ((2..=n).collect(), format!("y^2 = {}", rhs(n, (2..=n).map(|k| (k, n - k)))))
            }
            (Kind::D, _) if r.is_multiple_of(2) => {
                let n = r / 2;
                let mut d: Vec<u32> = (1..2 * n).map(|j| 2 * j).collect();
                d.push(2 * n);
                let eq =
                    format!("y*(x*y + p{}) = {}", 2 * n, rhs(2 * n - 1, (1..2 * n).map(|j| (2 * j, 2 * n - 1 - j))));
                (d, eq)
            }
            (Kind::D, _) => {
                let n = (r - 1) / 2;
                let mut d: Vec<u32> = (1..=2 * n).map(|j| 2 * j).collect();
                d.push(2 * n + 1);
                let eq = format!("y*(x*y + p{}) = {}", 2 * n + 1, rhs(2 * n, (1..=2 * n).map(|j| (2 * j, 2 * n - j))));
                (d, eq)
            }
            (Kind::E, 6) => {
                (vec![2, 5, 6, 8, 9, 12], "y^3 = x^4 + (p2*x^2 + p5*x + p8)*y + (p6*x^2 + p9*x + p12)".into())
            }
            (Kind::E, 7) => (
                vec![2, 6, 8, 10, 12, 14, 18],
                "y^3 = x^3*y + p10*x^2 + x*(p2*y^2 + p8*y + p14) + p6*y^2 + p12*y + p18".into(),
            ),
            (Kind::E, _) => (
                vec![2, 8, 12, 14, 18, 20, 24, 30],
                "y^3 = x^5 + (p2*x^3 + p8*x^2 + p14*x + p20)*y + (p12*x^3 + p18*x^2 + p24*x + p30)".into(),
            ),
        };
        degrees.sort_unstable();
        CurveFamily { dtype: t, degrees, equation, disc_degree: t.root_count() as u32 }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_sum(&self) -> u32 {
        self.degrees.iter().sum()
    }

    /// Whether `discriminant` can evaluate this family.
    pub fn has_discriminant(&self) -> bool {
        self.dtype.kind == Kind::A && self.dtype.rank <= MAX_A_RANK
    }
}

pub fn family(t: DynkinType) -> CurveFamily {
    CurveFamily::new(t)
}

/// `x^(m+1) + p_2 x^(m-1) + ... + p_(m+1)`, low degree first.
pub fn a_polynomial<R: Ring>(ring: &R, coords: &[R::Elem]) -> Vec<R::Elem> {
    let n = coords.len() + 1;
    let mut f = vec![ring.zero(); n + 1];
    for (i, c) in coords.iter().enumerate() {
        // p_{i+2} multiplies x^{n-i-2}
        f[n - i - 2] = c.clone();
    }
    f[n] = ring.one();
    f
}

/// Discriminant of the type `A_m` polynomial by the subresultant algorithm.
pub fn discriminant_a_in<R: Ring>(ring: &R, coords: &[R::Elem]) -> R::Elem {
    monic_discriminant(ring, &a_polynomial(ring, coords))
}

/// The discriminant as an explicit polynomial in `p_2, ..., p_(m+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedDisc {
    pub rank: usize,
    pub terms: Vec<(i64, Vec<u32>)>,
    partials: Vec<Vec<(i64, Vec<u32>)>>,
    max_exp: Vec<u32>,
}

fn small_terms(p: &MPoly) -> Vec<(i64, Vec<u32>)> {
    p.iter().map(|(e, c)| (c.to_i64().expect("coefficient fits i64"), e.clone())).collect()
}

impl ExpandedDisc {
    fn build(m: usize) -> Self {
        let ring = MPolyRing::new(m);
        let vars: Vec<MPoly> = (0..m).map(|i| ring.var(i)).collect();
        let disc = discriminant_a_in(&ring, &vars);
        let terms = small_terms(&disc);
        let partials = (0..m)
            .map(|k| {
                terms
                    .iter()
                    .filter(|(_, e)| e[k] > 0)
                    .map(|(c, e)| {
                        let mut e2 = e.clone();
                        e2[k] -= 1;
                        (c * e[k] as i64, e2)
                    })
                    .collect()
            })
            .collect();
        let max_exp = (0..m).map(|k| terms.iter().map(|(_, e)| e[k]).max().unwrap_or(0)).collect();
        ExpandedDisc { rank: m, terms, partials, max_exp }
    }

    fn powers<R: Ring>(&self, ring: &R, coords: &[R::Elem]) -> Vec<Vec<R::Elem>> {
        coords
            .iter()
            .zip(&self.max_exp)
            .map(|(c, &top)| {
                let mut v = Vec::with_capacity(top as usize + 1);
                v.push(ring.one());
                for i in 0..top as usize {
                    v.push(ring.mul(&v[i], c));
                }
                v
            })
            .collect()
    }

    fn sum_terms<R: Ring>(ring: &R, terms: &[(i64, Vec<u32>)], pw: &[Vec<R::Elem>]) -> R::Elem {
        let mut acc = ring.zero();
        for (c, e) in terms {
            let mut t = ring.from_i64(*c);
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    t = ring.mul(&t, &pw[k][ek as usize]);
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    pub fn eval<R: Ring>(&self, ring: &R, coords: &[R::Elem]) -> R::Elem {
        Self::sum_terms(ring, &self.terms, &self.powers(ring, coords))
    }

    /// `d Delta / d p_(k+2)` at `coords`.
    pub fn partial<R: Ring>(&self, ring: &R, coords: &[R::Elem], k: usize) -> R::Elem {
        Self::sum_terms(ring, &self.partials[k], &self.powers(ring, coords))
    }

    pub fn gradient<R: Ring>(&self, ring: &R, coords: &[R::Elem]) -> Vec<R::Elem> {
        let pw = self.powers(ring, coords);
        self.partials.iter().map(|t| Self::sum_terms(ring, t, &pw)).collect()
    }
}

/// Cached expanded discriminant of `A_m` for `2 <= m <= 4`.
pub fn expanded_discriminant(m: usize) -> Option<&'static ExpandedDisc> {
    static CACHE: [OnceLock<ExpandedDisc>; MAX_EXPANDED_RANK + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(2..=MAX_EXPANDED_RANK).contains(&m) {
        return None;
    }
    Some(CACHE[m].get_or_init(|| ExpandedDisc::build(m)))
}

fn check_a(family: &CurveFamily, b: &InvariantPoint) -> Result<usize> {
    if family.dtype.kind != Kind::A {
        return Err(AdeError::Unsupported(format!("no discriminant evaluator for {}", family.dtype)));
    }
    let m = family.dtype.rank;
    if m > MAX_A_RANK {
        return Err(AdeError::Unsupported(format!("rank {m} exceeds {MAX_A_RANK}")));
    }
    if b.coords.len() != m {
        return Err(AdeError::InvalidInput(format!("expected {m} coordinates, got {}", b.coords.len())));
    }
    Ok(m)
}

/// Primitive discriminant of `y^2 = f(x)`, normalised so that the cubic gives `-4p^3 - 27q^2`.
pub fn discriminant_a(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Result<RingInt> {
    let m = check_a(family, b)?;
    Ok(match expanded_discriminant(m) {
        Some(e) => e.eval(ctx.ring(), &b.coords),
        None => discriminant_a_in(ctx.ring(), &b.coords),
    })
}

/// Partial derivatives of the discriminant at `b`.
pub fn gradient_a(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Result<Vec<RingInt>> {
    let m = check_a(family, b)?;
    Ok(match expanded_discriminant(m) {
        Some(e) => e.gradient(ctx.ring(), &b.coords),
        None => gradient_by_interpolation(ctx, family, b),
    })
}

/// Differentiates `t -> Delta(b + t e_k)` at `t = 0` from its values at
/// `t = 0..=D`, where `D` bounds its degree:
/// `p'(0) = sum_{j>=1} (-1)^(j-1) C(D,j)/j (p(j) - p(0))`.
pub fn gradient_by_interpolation(ctx: &FieldContext, family: &CurveFamily, b: &InvariantPoint) -> Vec<RingInt> {
    let ring = ctx.ring();
    let y0 = discriminant_a_in(ring, &b.coords);
    family
        .degrees
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let top = family.disc_degree / d;
            let l = (1..=top).fold(BigInt::one(), |acc, j| acc.lcm(&BigInt::from(j)));
            let mut binom = BigInt::one();
            let mut acc = ring.zero();
            let mut pt = b.coords.clone();
            for j in 1..=top {
                binom = binom * BigInt::from(top - j + 1) / BigInt::from(j);
                let mut w = &binom * &l / BigInt::from(j);
                if j % 2 == 0 {
                    w = -w;
                }
                pt[k] = ring.add(&b.coords[k], &ring.from_i64(j as i64));
                let diff = ring.sub(&discriminant_a_in(ring, &pt), &y0);
                acc = ring.add(&acc, &ring.mul(&Quad::rational(w), &diff));
            }
            ring.div_exact(&acc, &Quad::rational(l)).expect("interpolated derivative is integral")
        })
        .collect()
}

/// Plane-curve discriminant of the `D4` family.
pub fn discriminant_d4(_b: &InvariantPoint) -> Result<RingInt> {
    Err(AdeError::NotImplemented("discriminant of the D4 family".into()))
}

/// Content of a polynomial's integer coefficients.
pub fn content(terms: &[(i64, Vec<u32>)]) -> i64 {
    terms.iter().fold(0i64, |g, (c, _)| g.gcd(c))
}

/// Weighted degree of every monomial of an expanded discriminant.
pub fn weighted_degrees(e: &ExpandedDisc, degrees: &[u32]) -> Vec<u32> {
    e.terms.iter().map(|(_, ex)| ex.iter().zip(degrees).map(|(a, d)| a * d).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ZZ;

    fn pt(v: &[i64]) -> InvariantPoint {
        InvariantPoint::from_ints(v)
    }

    #[test]
    fn degrees_and_templates() {
        let f = family(DynkinType::a(2));
        assert_eq!(f.degrees, vec![2, 3]);
        assert_eq!(f.equation, "y^2 = x^3 + p2*x + p3");
        assert_eq!(family(DynkinType::d(5)).degrees, vec![2, 4, 5, 6, 8]);
        assert_eq!(family(DynkinType::d(4)).degrees, vec![2, 4, 4, 6]);
        assert_eq!(family(DynkinType::e(8)).degree_sum(), 128);
    }

    #[test]
    fn cubic_values() {
        let q = FieldContext::rationals();
        let f = family(DynkinType::a(2));
        let d = |v: &[i64]| discriminant_a(&q, &f, &pt(v)).unwrap();
        assert_eq!(d(&[0, 0]), Quad::from_i64(0, 0));
        assert_eq!(d(&[-1, 0]), Quad::from_i64(4, 0));
        assert_eq!(d(&[0, 1]), Quad::from_i64(-27, 0));
        let e = expanded_discriminant(2).unwrap();
        let mut terms = e.terms.clone();
        terms.sort();
        assert_eq!(terms, vec![(-27, vec![0, 2]), (-4, vec![3, 0])]);
    }

    #[test]
    fn expanded_matches_resultant() {
        for m in 2..=4 {
            let e = expanded_discriminant(m).unwrap();
            assert_eq!(content(&e.terms), 1);
            let fam = family(DynkinType::a(m));
            assert!(weighted_degrees(e, &fam.degrees).iter().all(|&w| w == fam.disc_degree));
            let ring = ZZ::new();
            for s in 0..20i64 {
                let c: Vec<BigInt> = (0..m as i64).map(|i| BigInt::from((s * 7 + i * 13) % 19 - 9)).collect();
                assert_eq!(e.eval(&ring, &c), discriminant_a_in(&ring, &c));
            }
        }
    }

    #[test]
    fn gradient_examples() {
        let q = FieldContext::rationals();
        let f = family(DynkinType::a(2));
        let g = |v: &[i64]| gradient_a(&q, &f, &pt(v)).unwrap();
        let ints = |v: &[i64]| v.iter().map(|&a| Quad::from_i64(a, 0)).collect::<Vec<_>>();
        assert_eq!(g(&[-2, 4]), ints(&[-48, -216]));
        assert_eq!(g(&[0, 0]), ints(&[0, 0]));
        assert_eq!(g(&[1, 1]), ints(&[-12, -54]));
        assert_eq!(gradient_by_interpolation(&q, &f, &pt(&[-2, 4])), ints(&[-48, -216]));
    }

    #[test]
    fn d4_is_not_implemented() {
        assert!(matches!(discriminant_d4(&pt(&[0, 0, 0, 0])), Err(AdeError::NotImplemented(_))));
    }
}
