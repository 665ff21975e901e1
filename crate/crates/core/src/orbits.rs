//! Type `A` orbit construction: the shift making `m^2` visible in the trailing
//! coefficients, the symmetric anti-band matrix with a given characteristic
//! polynomial, its conjugation by `diag(m, 1, ..., 1, 1/m)` and the `Q`-invariant.

use crate::arith::factor::factor_u64;
use crate::arith::poly::{derivative, eval, taylor_shift};
use crate::arith::resultant::monic_discriminant;
use crate::arith::Ring;
use crate::error::{AdeError, Result};
use crate::numfield::{FieldContext, PrimeIdeal, Quad, RingInt};
use crate::rootsys::{graded_decomposition, DynkinType};
use crate::scanner::DivisibilityClass;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

/// `x^(n+1) + b_1 x^n + ... + b_(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonicPoly {
    pub coeffs: Vec<RingInt>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<RingInt>) -> Self {
        MonicPoly { coeffs }
    }

    pub fn from_ints(b: &[i64]) -> Self {
        MonicPoly { coeffs: b.iter().map(|&x| Quad::from_i64(x, 0)).collect() }
    }

    /// Parses `1,b_1,...,b_(n+1)`; the leading coefficient must be 1.
    pub fn parse(ctx: &FieldContext, s: &str) -> Result<Self> {
        let parts: Vec<RingInt> = s.split(',').map(|t| ctx.parse_element(t)).collect::<Result<_>>()?;
        match parts.split_first() {
            Some((lead, rest)) if *lead == ctx.int(1) && !rest.is_empty() => Ok(MonicPoly::new(rest.to_vec())),
            _ => Err(AdeError::InvalidInput(format!("expected a monic polynomial of degree at least 1, got {s:?}"))),
        }
    }

    /// `n + 1`.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients low degree first.
    pub fn dense(&self, ctx: &FieldContext) -> Vec<RingInt> {
        let mut v: Vec<RingInt> = self.coeffs.iter().rev().cloned().collect();
        v.push(ctx.int(1));
        v
    }

    fn from_dense(v: &[RingInt]) -> Self {
        MonicPoly { coeffs: v[..v.len() - 1].iter().rev().cloned().collect() }
    }

    pub fn discriminant(&self, ctx: &FieldContext) -> RingInt {
        monic_discriminant(ctx.ring(), &self.dense(ctx))
    }

    /// `f(x + l)`.
    pub fn shift(&self, ctx: &FieldContext, l: &RingInt) -> MonicPoly {
        MonicPoly::from_dense(&taylor_shift(ctx.ring(), &self.dense(ctx), l))
    }
}

fn divides(ctx: &FieldContext, d: &RingInt, x: &RingInt) -> bool {
    x.is_zero() || ctx.div_exact(x, d).is_some()
}

/// Strong or weak divisibility of `disc(f)` by `p^2`, over all coefficients
/// `b_1, ..., b_(n+1)`: since `c -> Delta(f + pi c) mod p^2` is affine, the
/// coordinate perturbations decide it.
pub fn divisibility(ctx: &FieldContext, f: &MonicPoly, prime: &PrimeIdeal) -> Result<DivisibilityClass> {
    let r = ctx.ring();
    let pi = &prime.generator;
    let pi2 = r.mul(pi, pi);
    let d = f.discriminant(ctx);
    if d.is_zero() {
        return Err(AdeError::ZeroDiscriminant);
    }
    if !divides(ctx, &pi2, &d) {
        return Ok(DivisibilityClass::NotDivisible);
    }
    for k in 0..f.degree() {
        let mut g = f.clone();
        g.coeffs[k] = r.add(&g.coeffs[k], pi);
        if !divides(ctx, &pi2, &g.discriminant(ctx)) {
            return Ok(DivisibilityClass::Weak);
        }
    }
    Ok(DivisibilityClass::Strong)
}

/// The primes dividing `m`, each exactly once.
fn squarefree_support(ctx: &FieldContext, m: &RingInt) -> Result<Vec<PrimeIdeal>> {
    let n = ctx.abs_norm(m).to_u64().ok_or_else(|| AdeError::InvalidInput(format!("norm of {m} exceeds 64 bits")))?;
    let mut out = Vec::new();
    for (p, _) in factor_u64(n) {
        for prime in ctx.primes_above(p) {
            match ctx.valuation(m, &prime) {
                Some(0) => {}
                Some(1) => out.push(prime),
                _ => return Err(AdeError::InvalidInput(format!("{m} is not squarefree at {}", prime.label()))),
            }
        }
    }
    Ok(out)
}

/// Least residue of `x` modulo `q`: symmetric over `Q`, Euclidean otherwise.
fn reduce_mod(ctx: &FieldContext, x: &RingInt, q: &RingInt) -> Result<RingInt> {
    if ctx.tag() == 0 {
        let m = q.a.abs();
        let mut r = x.a.mod_floor(&m);
        if BigInt::from(2) * &r > m {
            r -= &m;
        }
        return Ok(Quad::rational(r));
    }
    Ok(ctx.div_rem_euclid(x, q)?.1)
}

/// A shift `l` with `f(l) = 0 mod m^2` and `f'(l) = 0 mod m`, so that the two
/// trailing coefficients of `f(x + l)` are divisible by `m^2` and `m`. The
/// condition depends on `l mod m` only; the least residue is returned.
///
/// Fails with `NoShift` unless `m^2` weakly divides `disc(f)` at every prime of `m`.
pub fn weak_shift(ctx: &FieldContext, f: &MonicPoly, m: &RingInt) -> Result<RingInt> {
    if m.is_zero() {
        return Err(AdeError::InvalidInput("m must be nonzero".into()));
    }
    let r = ctx.ring();
    let dense = f.dense(ctx);
    let df = derivative(r, &dense);
    let mut l = r.zero();
    let mut modulus = r.one();
    for prime in squarefree_support(ctx, m)? {
        let class = divisibility(ctx, f, &prime)?;
        if class != DivisibilityClass::Weak {
            return Err(AdeError::NoShift(format!("divisibility at {} is {class:?}", prime.label())));
        }
        let pi = &prime.generator;
        let pi2 = r.mul(pi, pi);
        // f(r + pi t) = f(r) mod pi^2 once f'(r) = 0 mod pi, so residues mod pi suffice
        let local = ctx
            .ideal_lattice(pi)
            .residues()
            .into_iter()
            .map(|x| x.to_big())
            .find(|x| divides(ctx, pi, &eval(r, &df, x)) && divides(ctx, &pi2, &eval(r, &dense, x)))
            .ok_or_else(|| AdeError::NoShift(format!("no double root lifts modulo {}^2", prime.label())))?;
        // l + modulus * s * (local - l), where s * modulus = 1 mod pi
        let (g, s, _) = ctx.xgcd(&modulus, pi)?;
        let ginv = ctx.div_exact(&r.one(), &g).expect("coprime moduli have a unit gcd");
        let step = r.mul(&r.mul(&modulus, &r.mul(&s, &ginv)), &r.sub(&local, &l));
        modulus = r.mul(&modulus, pi);
        l = reduce_mod(ctx, &r.add(&l, &step), &modulus)?;
    }
    Ok(l)
}

/// A square matrix `num / den` over the ring of integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMatrix {
    pub num: Vec<Vec<RingInt>>,
    pub den: RingInt,
}

impl OrbitMatrix {
    pub fn size(&self) -> usize {
        self.num.len()
    }

    /// Divides numerators and denominator by `c` when every numerator allows it.
    pub fn cancel(&mut self, ctx: &FieldContext, c: &RingInt) -> bool {
        let all: Option<Vec<Vec<RingInt>>> = self
            .num
            .iter()
            .map(|row| row.iter().map(|x| if x.is_zero() { Some(x.clone()) } else { ctx.div_exact(x, c) }).collect())
            .collect();
        match (all, ctx.div_exact(&self.den, c)) {
            (Some(num), Some(den)) => {
                self.num = num;
                self.den = den;
                true
            }
            _ => false,
        }
    }

    /// Entry `(i, j)` as an element of the ring, if integral.
    pub fn integral_entry(&self, ctx: &FieldContext, i: usize, j: usize) -> Option<RingInt> {
        let x = &self.num[i][j];
        if x.is_zero() {
            return Some(x.clone());
        }
        ctx.div_exact(x, &self.den)
    }

    /// Whether `4 * self` has integral entries.
    pub fn is_quarter_integral(&self, ctx: &FieldContext) -> bool {
        let four = ctx.int(4);
        self.num.iter().flatten().all(|x| divides(ctx, &self.den, &ctx.ring().mul(&four, x)))
    }

    /// Entries as exact strings, reduced over `Q`.
    pub fn rows(&self, ctx: &FieldContext) -> Vec<Vec<String>> {
        self.num
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        if ctx.tag() == 0 {
                            BigRational::new(x.a.clone(), self.den.a.clone()).to_string()
                        } else if let Some(q) = ctx.div_exact(x, &self.den).filter(|_| !x.is_zero()) {
                            q.to_string()
                        } else if x.is_zero() {
                            "0".into()
                        } else {
                            format!("({x})/({})", self.den)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `b_1, ..., b_N` of `det(x I - self)`, by Faddeev-LeVerrier on the
    /// numerators and rescaling by powers of `den`.
    pub fn char_poly(&self, ctx: &FieldContext) -> Vec<Fraction> {
        let c = faddeev_leverrier(ctx, &self.num);
        let r = ctx.ring();
        let mut dk = r.one();
        let mut out = Vec::with_capacity(c.len());
        for ck in c {
            dk = r.mul(&dk, &self.den);
            out.push(Fraction { num: ck, den: dk.clone() });
        }
        out
    }

    /// Whether the characteristic polynomial is `f`.
    pub fn has_char_poly(&self, ctx: &FieldContext, f: &MonicPoly) -> bool {
        let cp = self.char_poly(ctx);
        cp.len() == f.degree() && cp.iter().zip(&f.coeffs).all(|(c, b)| c.num == ctx.ring().mul(b, &c.den))
    }

    /// Superdiagonal entries, if integral.
    pub fn superdiagonal(&self, ctx: &FieldContext) -> Option<Vec<RingInt>> {
        (0..self.size().saturating_sub(1)).map(|i| self.integral_entry(ctx, i, i + 1)).collect()
    }
}

/// `num / den` in the fraction field, compared by cross-multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: RingInt,
    pub den: RingInt,
}

/// `c_1, ..., c_N` with `det(x I - A) = x^N + c_1 x^(N-1) + ... + c_N`.
pub fn faddeev_leverrier(ctx: &FieldContext, a: &[Vec<RingInt>]) -> Vec<RingInt> {
    let r = ctx.ring();
    let n = a.len();
    let matmul = |x: &[Vec<RingInt>], y: &[Vec<RingInt>]| -> Vec<Vec<RingInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(r.zero(), |s, k| r.add(&s, &r.mul(&x[i][k], &y[k][j])))).collect())
            .collect()
    };
    let mut m: Vec<Vec<RingInt>> = vec![vec![r.zero(); n]; n];
    let mut c = Vec::with_capacity(n);
    let mut prev = r.one();
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = r.add(&row[i], &prev);
        }
        let am = matmul(a, &m);
        let tr = (0..n).fold(r.zero(), |s, i| r.add(&s, &am[i][i]));
        let ck = ctx.div_exact(&r.neg(&tr), &ctx.int(k as i64)).expect("Faddeev-LeVerrier traces are divisible by k");
        c.push(ck.clone());
        prev = ck;
        m = am;
    }
    c
}

/// `det(x I - A)` by Laplace expansion over column subsets, low degree first.
pub fn char_poly_cofactor(ctx: &FieldContext, a: &[Vec<RingInt>]) -> Vec<RingInt> {
    use crate::arith::poly::{add, mul};
    let r = ctx.ring();
    let n = a.len();
    let mut dp: Vec<Vec<RingInt>> = vec![Vec::new(); 1 << n];
    dp[0] = vec![r.one()];
    for mask in 0usize..(1 << n) {
        if dp[mask].is_empty() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for j in (0..n).filter(|j| mask & (1 << j) == 0) {
            let mut entry = vec![r.neg(&a[row][j])];
            if row == j {
                entry.push(r.one());
            }
            let mut term = mul(r, &dp[mask], &entry);
            if (mask >> (j + 1)).count_ones() % 2 == 1 {
                term = term.iter().map(|x| r.neg(x)).collect();
            }
            let next = mask | (1 << j);
            dp[next] = if dp[next].is_empty() { term } else { add(r, &dp[next], &term) };
        }
    }
    let mut out = std::mem::take(&mut dp[(1 << n) - 1]);
    out.resize(n + 1, r.zero());
    out
}

/// The anti-band matrix with characteristic polynomial `f`, as numerators over 2.
///
/// `b_k` sits on the `(k-1)`-th subdiagonal, centred: a single entry `-b_k`
/// when the centre is a cell, otherwise `-b_k/2` on the two cells exchanged by
/// the flip `(i, j) -> (n - j, n - i)`. All index ranges then share a point, so
/// the characteristic polynomial is linear in the entries.
pub fn companion_matrix(ctx: &FieldContext, f: &MonicPoly) -> OrbitMatrix {
    let r = ctx.ring();
    let size = f.degree();
    let n = size - 1;
    let two = ctx.int(2);
    let mut num = vec![vec![r.zero(); size]; size];
    for i in 0..n {
        num[i][i + 1] = two.clone();
    }
    for (idx, b) in f.coeffs.iter().enumerate() {
        let k = idx + 1;
        let neg = r.neg(b);
        if k == 1 && n % 2 == 1 {
            let j = (n - 1) / 2;
            num[j][j] = r.mul(&two, &neg);
        } else if (n + 1 - k).is_multiple_of(2) {
            let j = (n + 1 - k) / 2;
            num[j + k - 1][j] = r.mul(&two, &neg);
        } else {
            for j in [(n - k) / 2, (n - k + 2) / 2] {
                num[j + k - 1][j] = neg.clone();
            }
        }
    }
    let mut out = OrbitMatrix { num, den: two.clone() };
    out.cancel(ctx, &two);
    out
}

/// `D (B(f(x + l)) + l I) D^(-1)` with `D = diag(m, 1, ..., 1, 1/m)`.
pub fn construct_orbit(ctx: &FieldContext, f: &MonicPoly, m: &RingInt) -> Result<OrbitMatrix> {
    if f.degree() < 3 {
        return Err(AdeError::InvalidInput("the construction needs degree at least 3".into()));
    }
    let l = weak_shift(ctx, f, m)?;
    let r = ctx.ring();
    let g = f.shift(ctx, &l);
    let mut b = companion_matrix(ctx, &g);
    let size = b.size();
    for i in 0..size {
        b.num[i][i] = r.add(&b.num[i][i], &r.mul(&l, &b.den));
    }
    // scale by m^(e_i - e_j + 2) over den * m^2
    let e = |i: usize| -> i32 {
        if i == 0 {
            1
        } else if i == size - 1 {
            -1
        } else {
            0
        }
    };
    let m2 = r.mul(m, m);
    let num = (0..size)
        .map(|i| (0..size).map(|j| r.mul(&b.num[i][j], &r.pow(m, (e(i) - e(j) + 2) as u32))).collect())
        .collect();
    let mut out = OrbitMatrix { num, den: r.mul(&b.den, &m2) };
    out.cancel(ctx, &m2);
    out.cancel(ctx, &ctx.int(2));
    Ok(out)
}

/// Product of the height-one coordinates; each orbit of superdiagonal slots
/// under the diagram flip is one coordinate.
pub fn q_invariant(ctx: &FieldContext, w: &OrbitMatrix) -> Result<RingInt> {
    let size = w.size();
    if size < 2 {
        return Err(AdeError::ShapeError("matrix has no superdiagonal".into()));
    }
    for i in 0..size {
        for j in i + 2..size {
            if !w.num[i][j].is_zero() {
                return Err(AdeError::ShapeError(format!("entry ({i}, {j}) above the superdiagonal is nonzero")));
            }
        }
    }
    let sup = w.superdiagonal(ctx).ok_or_else(|| AdeError::ShapeError("superdiagonal is not integral".into()))?;
    let grading = graded_decomposition(DynkinType::a(size - 1));
    let r = ctx.ring();
    let mut q = r.one();
    for orbit in &grading.node_orbits {
        let v = &sup[orbit[0]];
        if orbit.iter().any(|&i| &sup[i] != v) {
            return Err(AdeError::ShapeError(format!("superdiagonal slots {orbit:?} are not flip-symmetric")));
        }
        q = r.mul(&q, v);
    }
    Ok(q)
}

/// JSON form of a constructed orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub field: String,
    pub poly: Vec<String>,
    pub m: String,
    pub shift: String,
    pub rows: Vec<Vec<String>>,
    pub superdiagonal: Vec<String>,
    pub q_invariant: String,
    pub char_poly_matches: bool,
    pub quarter_integral: bool,
}

pub fn orbit_report(ctx: &FieldContext, f: &MonicPoly, m: &RingInt) -> Result<OrbitReport> {
    let l = weak_shift(ctx, f, m)?;
    let w = construct_orbit(ctx, f, m)?;
    let q = q_invariant(ctx, &w)?;
    let mut poly = vec!["1".to_string()];
    poly.extend(f.coeffs.iter().map(|c| c.to_string()));
    Ok(OrbitReport {
        field: ctx.name(),
        poly,
        m: m.to_string(),
        shift: l.to_string(),
        rows: w.rows(ctx),
        superdiagonal: w.superdiagonal(ctx).unwrap_or_default().iter().map(|x| x.to_string()).collect(),
        q_invariant: q.to_string(),
        char_poly_matches: w.has_char_poly(ctx, f),
        quarter_integral: w.is_quarter_integral(ctx),
    })
}
