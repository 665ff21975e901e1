//! Sparse multivariate polynomials over `Z` with exact division.

use super::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Terms keyed by exponent vector; the lexicographically largest key is the leading term.
pub type MPoly = BTreeMap<Vec<u32>, BigInt>;

#[derive(Clone, Copy, Debug)]
pub struct MPolyRing {
    pub nvars: usize,
}

impl MPolyRing {
    pub fn new(nvars: usize) -> Self {
        MPolyRing { nvars }
    }

    pub fn var(&self, i: usize) -> MPoly {
        let mut e = vec![0; self.nvars];
        e[i] = 1;
        MPoly::from([(e, BigInt::one())])
    }

    fn constant(&self, c: BigInt) -> MPoly {
        if c.is_zero() {
            MPoly::new()
        } else {
            MPoly::from([(vec![0; self.nvars], c)])
        }
    }

    fn add_term(p: &mut MPoly, e: Vec<u32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        match p.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl Ring for MPolyRing {
    type Elem = MPoly;

    fn zero(&self) -> MPoly {
        MPoly::new()
    }
    fn one(&self) -> MPoly {
        self.constant(BigInt::one())
    }
    fn from_i64(&self, n: i64) -> MPoly {
        self.constant(BigInt::from(n))
    }
    fn add(&self, x: &MPoly, y: &MPoly) -> MPoly {
        let mut out = x.clone();
        for (e, c) in y {
            Self::add_term(&mut out, e.clone(), c.clone());
        }
        out
    }
    fn sub(&self, x: &MPoly, y: &MPoly) -> MPoly {
        let mut out = x.clone();
        for (e, c) in y {
            Self::add_term(&mut out, e.clone(), -c);
        }
        out
    }
    fn mul(&self, x: &MPoly, y: &MPoly) -> MPoly {
        let mut out = MPoly::new();
        for (ex, cx) in x {
            for (ey, cy) in y {
                let e = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
                Self::add_term(&mut out, e, cx * cy);
            }
        }
        out
    }
    fn neg(&self, x: &MPoly) -> MPoly {
        x.iter().map(|(e, c)| (e.clone(), -c)).collect()
    }
    fn is_zero(&self, x: &MPoly) -> bool {
        x.is_empty()
    }
    fn div_exact(&self, x: &MPoly, y: &MPoly) -> Option<MPoly> {
        let (ly, cy) = y.last_key_value()?;
        let mut rem = x.clone();
        let mut q = MPoly::new();
        while let Some((lr, cr)) = rem.last_key_value() {
            if lr.iter().zip(ly).any(|(a, b)| a < b) {
                return None;
            }
            let (c, r) = cr.div_rem(cy);
            if !r.is_zero() {
                return None;
            }
            let e: Vec<u32> = lr.iter().zip(ly).map(|(a, b)| a - b).collect();
            let t = MPoly::from([(e.clone(), c.clone())]);
            rem = self.sub(&rem, &self.mul(&t, y));
            Self::add_term(&mut q, e, c);
        }
        Some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let r = MPolyRing::new(2);
        let (x, y) = (r.var(0), r.var(1));
        let a = r.add(&x, &y);
        let b = r.sub(&x, &r.mul(&y, &y));
        let p = r.mul(&a, &b);
        assert_eq!(r.div_exact(&p, &a), Some(b.clone()));
        assert_eq!(r.div_exact(&p, &b), Some(a));
        assert_eq!(r.div_exact(&x, &y), None);
    }
}
