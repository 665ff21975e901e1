//! Dense univariate polynomials over a [`Ring`], stored low degree first.

use super::ring::Ring;

/// Strips trailing zero coefficients.
pub fn trim<R: Ring>(ring: &R, p: &mut Vec<R::Elem>) {
    while p.last().is_some_and(|c| ring.is_zero(c)) {
        p.pop();
    }
}

/// Degree of `p`, `None` for the zero polynomial.
pub fn degree<R: Ring>(ring: &R, p: &[R::Elem]) -> Option<usize> {
    p.iter().rposition(|c| !ring.is_zero(c))
}

pub fn eval<R: Ring>(ring: &R, p: &[R::Elem], x: &R::Elem) -> R::Elem {
    let mut acc = ring.zero();
    for c in p.iter().rev() {
        acc = ring.add(&ring.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<R: Ring>(ring: &R, p: &[R::Elem]) -> Vec<R::Elem> {
    let mut d: Vec<R::Elem> = p.iter().enumerate().skip(1).map(|(i, c)| ring.mul_i64(c, i as i64)).collect();
    trim(ring, &mut d);
    d
}

pub fn add<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let z = ring.zero();
    let mut out: Vec<R::Elem> = (0..n).map(|i| ring.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(ring, &mut out);
    out
}

pub fn mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
        }
    }
    trim(ring, &mut out);
    out
}

pub fn scale<R: Ring>(ring: &R, p: &[R::Elem], c: &R::Elem) -> Vec<R::Elem> {
    let mut out: Vec<R::Elem> = p.iter().map(|x| ring.mul(x, c)).collect();
    trim(ring, &mut out);
    out
}

/// Coefficients of `p(x + l)`.
pub fn taylor_shift<R: Ring>(ring: &R, p: &[R::Elem], l: &R::Elem) -> Vec<R::Elem> {
    let mut c = p.to_vec();
    let n = c.len();
    // repeated synthetic division by (x - l)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = ring.mul(&c[j + 1], l);
            c[j] = ring.add(&c[j], &t);
        }
    }
    trim(ring, &mut c);
    c
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn prem<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let db = degree(ring, b).expect("pseudo-division by zero polynomial");
    let mut r = a.to_vec();
    trim(ring, &mut r);
    let Some(da) = degree(ring, &r) else {
        return r;
    };
    if da < db {
        return r;
    }
    let lb = b[db].clone();
    let mut e = (da - db + 1) as u32;
    while let Some(dr) = degree(ring, &r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = ring.mul(c, &lb);
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            let t = ring.mul(&lr, bj);
            r[j + shift] = ring.sub(&r[j + shift], &t);
        }
        trim(ring, &mut r);
        e -= 1;
    }
    if e > 0 {
        let f = ring.pow(&lb, e);
        r = scale(ring, &r, &f);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::IntRing;

    #[test]
    fn shift_matches_direct_evaluation() {
        let r = IntRing::<i128>::new();
        let f = vec![4, -2, 0, 1];
        let g = taylor_shift(&r, &f, &-2);
        for x in -5..5 {
            assert_eq!(eval(&r, &g, &x), eval(&r, &f, &(x - 2)));
        }
    }

    #[test]
    fn prem_identity() {
        let r = IntRing::<i128>::new();
        let a = vec![1, 2, 3, 4, 5];
        let b = vec![1, 0, 3];
        let rem = prem(&r, &a, &b);
        assert!(degree(&r, &rem).is_none_or(|d| d < 2));
        // 3^3 * a - rem must vanish at the roots of b, checked via divisibility by b
        let lhs = add(&r, &scale(&r, &a, &27), &scale(&r, &rem, &-1));
        assert!(prem(&r, &lhs, &b).is_empty());
    }
}
