//! Resultants by the subresultant PRS and determinants by Bareiss elimination.

use super::poly::{degree, derivative, prem};
use super::ring::Ring;

/// `Res(a, b)` via the subresultant pseudo-remainder sequence.
///
/// Only exact divisions are performed, so the routine works over any
/// integral domain with [`Ring::div_exact`].
pub fn resultant<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> R::Elem {
    let (Some(mut da), Some(mut db)) = (degree(ring, a), degree(ring, b)) else {
        return ring.zero();
    };
    let mut a: Vec<R::Elem> = a[..=da].to_vec();
    let mut b: Vec<R::Elem> = b[..=db].to_vec();
    let mut negate = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        negate = (da * db) % 2 == 1;
    }
    if db == 0 {
        let r = ring.pow(&b[0], da as u32);
        return if negate { ring.neg(&r) } else { r };
    }
    let mut g = ring.one();
    let mut h = ring.one();
    loop {
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            negate = !negate;
        }
        let r = prem(ring, &a, &b);
        a = b;
        da = db;
        let Some(dr) = degree(ring, &r) else {
            return ring.zero();
        };
        let den = ring.mul(&g, &ring.pow(&h, delta));
        b = r.iter().take(dr + 1).map(|c| ring.div_exact(c, &den).expect("subresultant division not exact")).collect();
        db = dr;
        g = a[da].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => {
                let num = ring.pow(&g, delta);
                ring.div_exact(&num, &ring.pow(&h, delta - 1)).expect("subresultant h-update not exact")
            }
        };
        if db == 0 {
            let num = ring.pow(&b[0], da as u32);
            let res =
                ring.div_exact(&num, &ring.pow(&h, da as u32 - 1)).expect("subresultant final division not exact");
            return if negate { ring.neg(&res) } else { res };
        }
    }
}

/// Discriminant of a monic polynomial of degree `n`: `(-1)^(n(n-1)/2) Res(f, f')`.
pub fn monic_discriminant<R: Ring>(ring: &R, f: &[R::Elem]) -> R::Elem {
    let n = degree(ring, f).expect("discriminant of zero polynomial");
    assert!(f[n] == ring.one(), "polynomial must be monic");
    let r = resultant(ring, f, &derivative(ring, f));
    if (n * (n - 1) / 2) % 2 == 1 {
        ring.neg(&r)
    } else {
        r
    }
}

/// Sylvester matrix of `a` and `b` (coefficients low degree first).
pub fn sylvester<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<Vec<R::Elem>> {
    let da = degree(ring, a).unwrap_or(0);
    let db = degree(ring, b).unwrap_or(0);
    let n = da + db;
    let mut m = vec![vec![ring.zero(); n]; n];
    for i in 0..db {
        for j in 0..=da {
            m[i][i + j] = a[da - j].clone();
        }
    }
    for i in 0..da {
        for j in 0..=db {
            m[db + i][i + j] = b[db - j].clone();
        }
    }
    m
}

/// Fraction-free determinant (Bareiss) with row pivoting.
pub fn bareiss_det<R: Ring>(ring: &R, m: &[Vec<R::Elem>]) -> R::Elem {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    let mut a: Vec<Vec<R::Elem>> = m.to_vec();
    let mut prev = ring.one();
    let mut negate = false;
    for k in 0..n - 1 {
        if ring.is_zero(&a[k][k]) {
            let Some(p) = (k + 1..n).find(|&i| !ring.is_zero(&a[i][k])) else {
                return ring.zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = ring.sub(&ring.mul(&a[i][j], &a[k][k]), &ring.mul(&a[i][k], &a[k][j]));
                a[i][j] = ring.div_exact(&t, &prev).expect("Bareiss division not exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        ring.neg(&d)
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::IntRing;

    #[test]
    fn cubic_discriminant() {
        let r = IntRing::<i128>::new();
        // x^3 + p x + q
        for (p, q) in [(-1i128, 0i128), (0, 1), (-2, 4), (3, -7)] {
            let d = monic_discriminant(&r, &[q, p, 0, 1]);
            assert_eq!(d, -4 * p * p * p - 27 * q * q);
        }
    }

    #[test]
    fn resultant_of_constant() {
        let r = IntRing::<i128>::new();
        assert_eq!(resultant(&r, &[3], &[1, 1, 1]), 9);
        assert_eq!(resultant(&r, &[1, 1, 1], &[3]), 9);
    }
}
