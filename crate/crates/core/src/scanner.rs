//! Height-bounded enumeration of the fundamental domain, strong and weak
//! divisibility of discriminants, squarefree densities and tail counts.

use crate::arith::factor::{factor_u64, primes_up_to};
use crate::arith::{Int, Ring};
use crate::curvefam::{discriminant_a, gradient_a, MAX_A_RANK};
use crate::curvefam::{discriminant_a_in, expanded_discriminant, gradient_by_interpolation, CurveFamily, ExpandedDisc};
use crate::error::{AdeError, Result};
use crate::localdens::LocalRing;
use crate::numfield::{
    factor_with, primitive_in, FieldContext, InvariantPoint, PrimeIdeal, Quad, QuadRing, RingInt, UnitPowers,
};
use crate::rootsys::Kind;
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DivisibilityClass {
    NotDivisible,
    Weak,
    Strong,
}

fn check_family(family: &CurveFamily) -> Result<usize> {
    if family.dtype.kind != Kind::A || family.dtype.rank > MAX_A_RANK {
        return Err(AdeError::Unsupported(format!("no discriminant evaluator for {}", family.dtype)));
    }
    Ok(family.dtype.rank)
}

/// `|x|_v <= bound` means `|x| <= bound` over `Q` and `N(x) <= bound` otherwise.
/// Returns the elements sorted in the canonical `(a, b)` order.
pub fn elements_up_to(ctx: &FieldContext, bound: &BigInt) -> Vec<RingInt> {
    if bound.is_negative() {
        return Vec::new();
    }
    if ctx.tag() == 0 {
        let b = bound.to_i64().expect("coordinate bound fits i64");
        return (-b..=b).map(|a| Quad::from_i64(a, 0)).collect();
    }
    let mut out = Vec::new();
    visit_norm_ball(ctx, bound, |a, b| out.push(Quad::new(a, b)));
    out.sort();
    out
}

/// `#{x : |x|_v <= bound}`.
pub fn count_up_to(ctx: &FieldContext, bound: &BigInt) -> BigInt {
    if bound.is_negative() {
        return BigInt::zero();
    }
    if ctx.tag() == 0 {
        return BigInt::from(2) * bound + 1;
    }
    let t = ctx.ring().t;
    let dk = -ctx.discriminant();
    let bmax = Roots::sqrt(&(BigInt::from(4) * bound / BigInt::from(dk)));
    let mut total = BigInt::zero();
    let mut b = -bmax.clone();
    while b <= bmax {
        let d: BigInt = BigInt::from(4) * bound - BigInt::from(dk) * &b * &b;
        let s = d.sqrt();
        // u = 2a + t b ranges over [-s, s] with the parity of t b
        let parity = (BigInt::from(t) * &b) % 2 != BigInt::zero();
        let sodd = &s % 2 != BigInt::zero();
        total += if parity == sodd { &s + 1 } else { s };
        b += 1;
    }
    total
}

fn visit_norm_ball(ctx: &FieldContext, bound: &BigInt, mut f: impl FnMut(BigInt, BigInt)) {
    let t = BigInt::from(ctx.ring().t);
    let dk = BigInt::from(-ctx.discriminant());
    let bmax = Roots::sqrt(&(BigInt::from(4) * bound / &dk));
    let mut b = -bmax.clone();
    while b <= bmax {
        let d: BigInt = BigInt::from(4) * bound - &dk * &b * &b;
        let s = d.sqrt();
        let tb = &t * &b;
        let mut u = -s.clone();
        while u <= s {
            let num = &u - &tb;
            if num.is_even() {
                f(num / 2, b.clone());
            }
            u += 1;
        }
        b += 1;
    }
}

fn coordinate_bounds(family: &CurveFamily, x: u64) -> Vec<BigInt> {
    family.degrees.iter().map(|&d| Pow::pow(&BigInt::from(x), d) - 1).collect()
}

/// Lexicographic product iteration; `f` sees every tuple whose first entry
/// lies in `lead`.
fn product_visit<T: Clone>(lists: &[Vec<T>], lead: std::ops::Range<usize>, mut f: impl FnMut(&[T])) {
    let r = lists.len();
    if lists.iter().any(|l| l.is_empty()) || lead.is_empty() {
        return;
    }
    for i0 in lead {
        let mut idx = vec![0usize; r];
        idx[0] = i0;
        let mut cur: Vec<T> = idx.iter().zip(lists).map(|(&i, l)| l[i].clone()).collect();
        'inner: loop {
            f(&cur);
            let mut k = r - 1;
            loop {
                if k == 0 {
                    break 'inner;
                }
                idx[k] += 1;
                if idx[k] < lists[k].len() {
                    cur[k] = lists[k][idx[k]].clone();
                    break;
                }
                idx[k] = 0;
                cur[k] = lists[k][0].clone();
                k -= 1;
            }
        }
    }
}

struct SigmaBox<I> {
    ring: QuadRing<I>,
    lists: Vec<Vec<Quad<I>>>,
    units: UnitPowers<I>,
}

impl<I: Int> SigmaBox<I> {
    fn new(ctx: &FieldContext, family: &CurveFamily, x: u64) -> Self {
        let ring = QuadRing::<I>::new(ctx.tag());
        let lists = coordinate_bounds(family, x)
            .iter()
            .map(|b| {
                elements_up_to(ctx, b)
                    .iter()
                    .map(|e| Quad::<I>::from_big(e).expect("coordinate fits backend"))
                    .collect()
            })
            .collect();
        let units = UnitPowers::new(ctx, &ring, &family.degrees);
        SigmaBox { ring, lists, units }
    }

    fn visit(
        &self,
        ctx: &FieldContext,
        family: &CurveFamily,
        lead: std::ops::Range<usize>,
        mut f: impl FnMut(&[Quad<I>]),
    ) {
        product_visit(&self.lists, lead, |c| {
            if c.iter().all(|x| x.is_zero()) {
                return;
            }
            if !self.units.is_canonical(&self.ring, c) {
                return;
            }
            if !primitive_in(ctx, &self.ring, &family.degrees, c) {
                return;
            }
            f(c);
        });
    }
}

/// The points of `Sigma` with `Ht(b) < X`, in lexicographic order of coordinates.
pub fn enumerate_sigma(ctx: &FieldContext, family: &CurveFamily, x: u64) -> Vec<InvariantPoint> {
    let sb = SigmaBox::<BigInt>::new(ctx, family, x);
    let mut out = Vec::new();
    let n0 = sb.lists.first().map_or(0, |l| l.len());
    sb.visit(ctx, family, 0..n0, |c| out.push(InvariantPoint::new(c.to_vec())));
    out
}

/// Sum over ideals of norm `n` of the Moebius function.
fn ideal_mobius(ctx: &FieldContext, n: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let mut g = 1i64;
    for (p, e) in factor_u64(n) {
        let v = if ctx.tag() == 0 {
            if e == 1 {
                -1
            } else {
                0
            }
        } else {
            match (ctx.kronecker(p), e) {
                (1, 1) => -2,
                (1, 2) => 1,
                (0, 1) => -1,
                (-1, 2) => -1,
                _ => 0,
            }
        };
        g *= v;
        if g == 0 {
            return 0;
        }
    }
    g
}

/// `#{b in Sigma : Ht(b) < X}` without enumeration: Burnside over the units and
/// Moebius inversion over ideals `I` with `I^{d_i} | p_i`.
pub fn count_sigma(ctx: &FieldContext, family: &CurveFamily, x: u64) -> u128 {
    if x <= 1 {
        return 0;
    }
    let ring = ctx.ring();
    let one = ring.one();
    let supports: Vec<Vec<usize>> = ctx
        .units()
        .iter()
        .map(|u| (0..family.rank()).filter(|&i| ring.pow(u, family.degrees[i]) == one).collect())
        .collect();
    let xb = BigInt::from(x);
    let mut total = BigInt::zero();
    for n in 1..x {
        let g = ideal_mobius(ctx, n);
        if g == 0 {
            continue;
        }
        let nb = BigInt::from(n);
        let c: Vec<BigInt> =
            family.degrees.iter().map(|&d| count_up_to(ctx, &((Pow::pow(&xb, d) - 1) / Pow::pow(&nb, d)))).collect();
        for s in &supports {
            let prod: BigInt = s.iter().map(|&i| c[i].clone()).product();
            total += BigInt::from(g) * (prod - 1);
        }
    }
    let u = BigInt::from(ctx.units().len());
    assert!((&total % &u).is_zero(), "orbit count is integral");
    (total / u).to_u128().expect("count fits u128")
}

/// Least-squares slope of `log y` against `log x`, skipping nonpositive `y`.
pub fn slope_fit(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Classifies `p^2 | Delta(b)` by the first-order expansion
/// `Delta(b + pi c) = Delta(b) + pi <grad Delta(b), c> mod p^2`.
pub fn classify(
    ctx: &FieldContext,
    family: &CurveFamily,
    b: &InvariantPoint,
    prime: &PrimeIdeal,
) -> Result<DivisibilityClass> {
    let d = discriminant_a(ctx, family, b)?;
    let v = ctx.valuation(&d, prime).ok_or(AdeError::ZeroDiscriminant)?;
    if v <= 1 {
        return Ok(DivisibilityClass::NotDivisible);
    }
    let g = gradient_a(ctx, family, b)?;
    let strong = g.iter().all(|x| x.is_zero() || ctx.valuation(x, prime).unwrap_or(0) >= 1);
    Ok(if strong { DivisibilityClass::Strong } else { DivisibilityClass::Weak })
}

/// Classification by enumerating `c` over `(O/p)^r` and testing `Delta(b + pi c) mod p^2`.
pub fn classify_brute(
    ctx: &FieldContext,
    family: &CurveFamily,
    b: &InvariantPoint,
    prime: &PrimeIdeal,
) -> Result<DivisibilityClass> {
    let m = check_family(family)?;
    if b.coords.len() != m {
        return Err(AdeError::InvalidInput(format!("expected {m} coordinates")));
    }
    if discriminant_a(ctx, family, b)?.is_zero() {
        return Err(AdeError::ZeroDiscriminant);
    }
    let lr = LocalRing::new(ctx, prime);
    let base: Vec<[u64; 2]> = b.coords.iter().map(|c| lr.reduce(c)).collect();
    Ok(brute_local(ctx, &lr, expanded_discriminant(m), &base))
}

fn brute_local(ctx: &FieldContext, lr: &LocalRing, exp: Option<&ExpandedDisc>, base: &[[u64; 2]]) -> DivisibilityClass {
    let eval = |pt: &[[u64; 2]]| match exp {
        Some(e) => e.eval(lr, pt),
        None => {
            let lifts: Vec<RingInt> = pt.iter().map(|x| lr.lift(x)).collect();
            lr.reduce(&discriminant_a_in(ctx.ring(), &lifts))
        }
    };
    if !lr.is_zero(&eval(base)) {
        return DivisibilityClass::NotDivisible;
    }
    let reps = lr.residues_mod_prime();
    let r = base.len();
    let mut idx = vec![0usize; r];
    let mut pt = base.to_vec();
    loop {
        for k in 0..r {
            pt[k] = lr.add(&base[k], &lr.mul(&lr.pi, &reps[idx[k]]));
        }
        if !lr.is_zero(&eval(&pt)) {
            return DivisibilityClass::Weak;
        }
        let mut k = 0;
        loop {
            if k == r {
                return DivisibilityClass::Strong;
            }
            idx[k] += 1;
            if idx[k] < reps.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

const BRUTE_LIFTS: u64 = 1 << 12;

/// Inputs of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub x: u64,
    pub prime_bound: u64,
    /// Rational primes standing in for the bad set; `None` selects the default.
    pub excluded_primes: Option<Vec<u64>>,
    pub m_grid: Vec<f64>,
    /// Level of the congruence conditions in the sieve cut `M = X^(4/(2 kappa + 3))`.
    pub kappa: u32,
    /// Pairs with `N p` up to this bound are also classified by brute force,
    /// provided `N p^rank` stays within `BRUTE_LIFTS`.
    pub brute_norm_bound: u64,
    /// Largest cofactor that is factored completely.
    pub factor_budget: u64,
    pub dump: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            x: 15,
            prime_bound: 100,
            excluded_primes: None,
            m_grid: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            kappa: 2,
            brute_norm_bound: 13,
            factor_budget: 1 << 63,
            dump: false,
        }
    }
}

/// Rational primes dividing `2 m (m + 1)` for `A_m`.
pub fn default_excluded_primes(family: &CurveFamily) -> Vec<u64> {
    let m = family.dtype.rank as u64;
    let n = 2 * m * (m + 1);
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTally {
    pub label: String,
    pub norm: u64,
    pub not_divisible: u64,
    pub weak: u64,
    pub strong: u64,
    /// Pairs with `p^2 | Delta` also classified by brute force.
    pub brute_checked: u64,
    pub disagreements: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub m: f64,
    pub combined: u64,
    pub strong: u64,
    pub weak: u64,
    /// Weak count with `I` coprime to the excluded primes.
    pub weak_coprime: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub coords: Vec<String>,
    pub discriminant: String,
    pub squarefree: Option<bool>,
    pub classes: Vec<(String, DivisibilityClass)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub field: String,
    #[serde(rename = "type")]
    pub dtype: String,
    #[serde(rename = "X")]
    pub x: u64,
    pub prime_bound: u64,
    /// Points of `Sigma` with `Ht < X`, including those with `Delta = 0`.
    pub total: u64,
    pub zero_discriminant: u64,
    pub squarefree_count: u64,
    /// Points whose squarefreeness was not decided within the factoring budget.
    pub undecided: u64,
    pub empirical_density: Option<f64>,
    /// `[squarefree, squarefree + undecided] / total`.
    pub density_interval: Option<(f64, f64)>,
    pub band: f64,
    pub tallies: Vec<PrimeTally>,
    /// Points with `p^2 | Delta` for some `N p > prime_bound`.
    pub large_square_divisors: u64,
    pub classifier_disagreements: u64,
    pub tail_counts: Vec<TailRow>,
    /// The sieve cut `X^(4/(2 kappa + 3))`.
    pub sieve_cut: f64,
    pub excluded_primes: Vec<u64>,
    pub records: Option<Vec<PointRecord>>,
}

/// Products of `N p` over the primes with `p^2 | Delta(b)`.
#[derive(Clone, Copy, Debug, Default)]
struct TailKey {
    combined: u128,
    strong: u128,
    weak: u128,
    weak_coprime: u128,
}

#[derive(Default)]
struct Partial {
    total: u64,
    zero: u64,
    squarefree: u64,
    undecided: u64,
    large: u64,
    weak: Vec<u64>,
    strong: Vec<u64>,
    brute: Vec<u64>,
    disagree: Vec<u64>,
    tails: Vec<TailKey>,
    records: Vec<PointRecord>,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.total += o.total;
        self.zero += o.zero;
        self.squarefree += o.squarefree;
        self.undecided += o.undecided;
        self.large += o.large;
        for (a, b) in [
            (&mut self.weak, &o.weak),
            (&mut self.strong, &o.strong),
            (&mut self.brute, &o.brute),
            (&mut self.disagree, &o.disagree),
        ] {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.tails.extend(o.tails);
        self.records.extend(o.records);
        self
    }
}

struct PrimeData<I> {
    ideal: PrimeIdeal,
    pi: Quad<I>,
    local: Option<LocalRing>,
    /// Index into the tally table when `N p <= prime_bound`.
    slot: Option<usize>,
    excluded: bool,
}

struct Scanner<'a, I> {
    ctx: &'a FieldContext,
    family: &'a CurveFamily,
    cfg: &'a ScanConfig,
    ring: QuadRing<I>,
    exp: Option<&'static ExpandedDisc>,
    trial: Vec<u64>,
    excluded: Vec<u64>,
    slots: HashMap<(u64, RingInt), usize>,
    nslots: usize,
    rank: u32,
}

impl<'a, I: Int> Scanner<'a, I> {
    fn primes_above(&self, p: u64, cache: &mut HashMap<u64, Vec<PrimeData<I>>>) -> *const Vec<PrimeData<I>> {
        let entry = cache.entry(p).or_insert_with(|| {
            self.ctx
                .primes_above(p)
                .into_iter()
                .map(|ideal| PrimeData {
                    pi: Quad::<I>::from_big(&ideal.generator).expect("generator fits backend"),
                    local: (ideal.norm <= self.cfg.brute_norm_bound
                        && ideal.norm.checked_pow(self.rank).is_some_and(|w| w <= BRUTE_LIFTS))
                    .then(|| LocalRing::new(self.ctx, &ideal)),
                    slot: self.slots.get(&(ideal.norm, ideal.generator.clone())).copied(),
                    excluded: self.excluded.contains(&p),
                    ideal,
                })
                .collect()
        });
        entry as *const _
    }

    fn valuation(&self, x: &Quad<I>, pi: &Quad<I>) -> u32 {
        let mut v = 0;
        let mut y = x.clone();
        while let Some(q) = self.ring.div_exact(&y, pi) {
            y = q;
            v += 1;
        }
        v
    }

    fn disc(&self, c: &[Quad<I>]) -> RingInt {
        match self.exp {
            Some(e) => e.eval(&self.ring, c).to_big(),
            None => {
                let big: Vec<RingInt> = c.iter().map(|x| x.to_big()).collect();
                discriminant_a_in(self.ctx.ring(), &big)
            }
        }
    }

    fn gradient(&self, c: &[Quad<I>]) -> Vec<RingInt> {
        match self.exp {
            Some(e) => e.gradient(&self.ring, c).iter().map(|x| x.to_big()).collect(),
            None => {
                let b = InvariantPoint::new(c.iter().map(|x| x.to_big()).collect());
                gradient_by_interpolation(self.ctx, self.family, &b)
            }
        }
    }

    /// Rational primes dividing `|N(d)|` with exponents, and whether the factorisation is complete.
    fn factor_norm(&self, d: &RingInt) -> (Vec<(u64, u32)>, bool) {
        let n = self.ctx.abs_norm(d);
        if let Some(small) = n.to_u64().filter(|&s| s <= self.cfg.factor_budget) {
            return (factor_u64(small), true);
        }
        let budget = BigUint::from(self.cfg.factor_budget);
        match factor_with(self.ctx, d, &self.trial, &budget) {
            Ok(out) => {
                let decided = out.decides_squarefree();
                let mut ps: Vec<(u64, u32)> = out.factors.iter().map(|(p, _)| (p.p, 0)).collect();
                ps.dedup();
                (ps, decided)
            }
            Err(_) => (Vec::new(), false),
        }
    }

    fn point(&self, c: &[Quad<I>], cache: &mut HashMap<u64, Vec<PrimeData<I>>>, acc: &mut Partial) {
        acc.total += 1;
        let d = self.disc(c);
        if d.is_zero() {
            acc.zero += 1;
            if self.cfg.dump {
                acc.records.push(PointRecord {
                    coords: c.iter().map(|x| x.to_big().to_string()).collect(),
                    discriminant: "0".into(),
                    squarefree: Some(false),
                    classes: Vec::new(),
                });
            }
            return;
        }
        let (rational, decided) = self.factor_norm(&d);
        let dl = Quad::<I>::from_big(&d).expect("discriminant fits backend");
        let mut grad: Option<Vec<Quad<I>>> = None;
        let mut key = TailKey { combined: 1, strong: 1, weak: 1, weak_coprime: 1 };
        let mut classes = Vec::new();
        let mut any_square = false;
        for (p, _) in rational {
            // SAFETY: the cache is only read while this borrow is live
            let primes = unsafe { &*self.primes_above(p, cache) };
            for pd in primes {
                let v = self.valuation(&dl, &pd.pi);
                if v < 2 {
                    continue;
                }
                any_square = true;
                let g = grad.get_or_insert_with(|| {
                    self.gradient(c).iter().map(|x| Quad::<I>::from_big(x).expect("gradient fits backend")).collect()
                });
                let strong = g.iter().all(|x| x.is_zero() || self.ring.div_exact(x, &pd.pi).is_some());
                let class = if strong { DivisibilityClass::Strong } else { DivisibilityClass::Weak };
                let norm = pd.ideal.norm as u128;
                key.combined *= norm;
                if strong {
                    key.strong *= norm;
                } else {
                    key.weak *= norm;
                    if !pd.excluded {
                        key.weak_coprime *= norm;
                    }
                }
                match pd.slot {
                    Some(s) => {
                        if strong {
                            acc.strong[s] += 1;
                        } else {
                            acc.weak[s] += 1;
                        }
                        if let Some(lr) = &pd.local {
                            let base: Vec<[u64; 2]> = c.iter().map(|x| lr.reduce(&x.to_big())).collect();
                            acc.brute[s] += 1;
                            if brute_local(self.ctx, lr, self.exp, &base) != class {
                                acc.disagree[s] += 1;
                            }
                        }
                    }
                    None => acc.large += 1,
                }
                if self.cfg.dump {
                    classes.push((pd.ideal.label(), class));
                }
            }
        }
        let squarefree = if any_square {
            Some(false)
        } else if decided {
            Some(true)
        } else {
            None
        };
        match squarefree {
            Some(true) => acc.squarefree += 1,
            None => acc.undecided += 1,
            Some(false) => {}
        }
        if any_square {
            acc.tails.push(key);
        }
        if self.cfg.dump {
            acc.records.push(PointRecord {
                coords: c.iter().map(|x| x.to_big().to_string()).collect(),
                discriminant: d.to_string(),
                squarefree,
                classes,
            });
        }
    }
}

fn backend_bits(ctx: &FieldContext, family: &CurveFamily, x: u64) -> f64 {
    let coef: f64 = match expanded_discriminant(family.dtype.rank) {
        Some(e) => e.terms.iter().map(|(c, _)| c.unsigned_abs() as f64).sum(),
        None => return f64::INFINITY,
    };
    let lx = (x.max(2) as f64).log2();
    let d = family.disc_degree as f64;
    if ctx.tag() == 0 {
        coef.log2() + d * lx + 4.0
    } else {
        // coordinates of a + b w can exceed |x| by a bounded factor at each product
        coef.log2() + d * (lx / 2.0 + 1.0) + (ctx.discriminant().unsigned_abs() as f64).log2() + 8.0
    }
}

fn run_scan<I: Int>(ctx: &FieldContext, family: &CurveFamily, cfg: &ScanConfig) -> ScanReport {
    let excluded = cfg.excluded_primes.clone().unwrap_or_else(|| default_excluded_primes(family));
    let tally_primes = ctx.primes_up_to_norm(cfg.prime_bound);
    let slots: HashMap<(u64, RingInt), usize> =
        tally_primes.iter().enumerate().map(|(i, p)| ((p.norm, p.generator.clone()), i)).collect();
    let scanner = Scanner::<I> {
        ctx,
        family,
        cfg,
        ring: QuadRing::new(ctx.tag()),
        exp: expanded_discriminant(family.dtype.rank),
        trial: primes_up_to(cfg.prime_bound.max(2)),
        excluded: excluded.clone(),
        slots,
        nslots: tally_primes.len(),
        rank: family.rank() as u32,
    };
    let sigma = if cfg.x >= 1 { Some(SigmaBox::<I>::new(ctx, family, cfg.x)) } else { None };
    let n0 = sigma.as_ref().map_or(0, |s| s.lists[0].len());
    const CHUNK: usize = 4;
    let chunks: Vec<std::ops::Range<usize>> = (0..n0).step_by(CHUNK).map(|s| s..(s + CHUNK).min(n0)).collect();
    let empty = || Partial {
        weak: vec![0; scanner.nslots],
        strong: vec![0; scanner.nslots],
        brute: vec![0; scanner.nslots],
        disagree: vec![0; scanner.nslots],
        ..Default::default()
    };
    let parts: Vec<Partial> = chunks
        .into_par_iter()
        .map(|range| {
            let mut acc = empty();
            let mut cache = HashMap::new();
            if let Some(sb) = &sigma {
                sb.visit(ctx, family, range, |c| scanner.point(c, &mut cache, &mut acc));
            }
            acc
        })
        .collect();
    let acc = parts.into_iter().fold(empty(), Partial::merge);
    let nonzero = acc.total - acc.zero;
    let tallies = tally_primes
        .iter()
        .enumerate()
        .map(|(i, p)| PrimeTally {
            label: p.label(),
            norm: p.norm,
            not_divisible: nonzero - acc.weak[i] - acc.strong[i],
            weak: acc.weak[i],
            strong: acc.strong[i],
            brute_checked: acc.brute[i],
            disagreements: acc.disagree[i],
        })
        .collect();
    let sieve_cut = (cfg.x as f64).powf(4.0 / (2.0 * cfg.kappa as f64 + 3.0));
    let mut grid = cfg.m_grid.clone();
    if !grid.iter().any(|&m| (m - sieve_cut).abs() < 1e-9) {
        grid.push(sieve_cut);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    let tail_counts = tail_rows(&acc.tails, &grid);
    let total = acc.total;
    let (density, interval, band) = if total == 0 {
        (None, None, 0.0)
    } else {
        let t = total as f64;
        let lo = acc.squarefree as f64 / t;
        let hi = (acc.squarefree + acc.undecided) as f64 / t;
        (Some(lo), Some((lo, hi)), hi - lo)
    };
    ScanReport {
        field: ctx.name(),
        dtype: family.dtype.to_string(),
        x: cfg.x,
        prime_bound: cfg.prime_bound,
        total,
        zero_discriminant: acc.zero,
        squarefree_count: acc.squarefree,
        undecided: acc.undecided,
        empirical_density: density,
        density_interval: interval,
        band,
        tallies,
        large_square_divisors: acc.large,
        classifier_disagreements: acc.disagree.iter().sum(),
        tail_counts,
        sieve_cut,
        excluded_primes: excluded,
        records: cfg.dump.then_some(acc.records),
    }
}

fn tail_rows(tails: &[TailKey], grid: &[f64]) -> Vec<TailRow> {
    grid.iter()
        .map(|&m| {
            let over = |f: fn(&TailKey) -> u128| tails.iter().filter(|k| f(k) as f64 > m).count() as u64;
            TailRow {
                m,
                combined: over(|k| k.combined),
                strong: over(|k| k.strong),
                weak: over(|k| k.weak),
                weak_coprime: over(|k| k.weak_coprime),
            }
        })
        .collect()
}

/// Scans `Sigma` up to height `X`.
pub fn scan(ctx: &FieldContext, family: &CurveFamily, cfg: &ScanConfig) -> Result<ScanReport> {
    check_family(family)?;
    if backend_bits(ctx, family, cfg.x) < 120.0 {
        Ok(run_scan::<i128>(ctx, family, cfg))
    } else {
        Ok(run_scan::<BigInt>(ctx, family, cfg))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailDecay {
    pub rows: Vec<TailRow>,
    /// Fitted exponent of `M` in the combined count.
    pub combined_exponent: Option<f64>,
    pub strong_exponent: Option<f64>,
    pub weak_exponent: Option<f64>,
    pub monotone: bool,
}

/// Tail counts on `m_grid` with fitted decay exponents.
pub fn tail_decay(ctx: &FieldContext, family: &CurveFamily, x: u64, m_grid: &[f64]) -> Result<TailDecay> {
    let cfg = ScanConfig { x, m_grid: m_grid.to_vec(), brute_norm_bound: 0, ..Default::default() };
    let report = scan(ctx, family, &cfg)?;
    Ok(decay_from_rows(report.tail_counts.into_iter().filter(|r| m_grid.contains(&r.m)).collect()))
}

pub fn decay_from_rows(rows: Vec<TailRow>) -> TailDecay {
    let fit = |f: fn(&TailRow) -> u64| slope_fit(&rows.iter().map(|r| (r.m, f(r) as f64)).collect::<Vec<_>>());
    let monotone = rows.windows(2).all(|w| {
        w[1].combined <= w[0].combined
            && w[1].strong <= w[0].strong
            && w[1].weak <= w[0].weak
            && w[1].weak_coprime <= w[0].weak_coprime
    });
    TailDecay {
        combined_exponent: fit(|r| r.combined),
        strong_exponent: fit(|r| r.strong),
        weak_exponent: fit(|r| r.weak),
        monotone,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::in_sigma;
    use crate::rootsys::DynkinType;

    fn a2() -> CurveFamily {
        CurveFamily::new(DynkinType::a(2))
    }

    #[test]
    fn norm_ball_counts() {
        for tag in [0, -1, -2, -3, -7] {
            let k = FieldContext::new(tag).unwrap();
            for b in [0i64, 1, 2, 5, 30, 101] {
                let bb = BigInt::from(b);
                let list = elements_up_to(&k, &bb);
                assert_eq!(BigInt::from(list.len()), count_up_to(&k, &bb), "tag {tag} bound {b}");
                assert!(list.iter().all(|x| k.abs_value(x) <= bb));
            }
        }
    }

    #[test]
    fn sigma_matches_box_filter() {
        for k in [FieldContext::rationals(), FieldContext::gaussian()] {
            let f = a2();
            for x in 1..=3u64 {
                let got = enumerate_sigma(&k, &f, x);
                let mut want = Vec::new();
                let lists: Vec<Vec<RingInt>> = coordinate_bounds(&f, x).iter().map(|b| elements_up_to(&k, b)).collect();
                product_visit(&lists, 0..lists[0].len(), |c| {
                    let b = InvariantPoint::new(c.to_vec());
                    if !b.is_zero() && in_sigma(&k, &f, &b).unwrap() {
                        want.push(b);
                    }
                });
                assert_eq!(got, want);
                assert_eq!(got.len() as u128, count_sigma(&k, &f, x));
            }
        }
    }

    #[test]
    fn pinned_classes() {
        let q = FieldContext::rationals();
        let f = a2();
        let b = InvariantPoint::from_ints(&[-2, 4]);
        let p = |n: u64| q.primes_above(n)[0].clone();
        assert_eq!(classify(&q, &f, &b, &p(5)).unwrap(), DivisibilityClass::Weak);
        assert_eq!(classify(&q, &f, &b, &p(2)).unwrap(), DivisibilityClass::Strong);
        assert_eq!(classify_brute(&q, &f, &b, &p(5)).unwrap(), DivisibilityClass::Weak);
        assert_eq!(classify_brute(&q, &f, &b, &p(2)).unwrap(), DivisibilityClass::Strong);
        let c = InvariantPoint::from_ints(&[3, 0]);
        assert_eq!(classify(&q, &f, &c, &p(3)).unwrap(), DivisibilityClass::Strong);
        assert_eq!(classify_brute(&q, &f, &c, &p(3)).unwrap(), DivisibilityClass::Strong);
        let z = InvariantPoint::from_ints(&[0, 0]);
        assert_eq!(classify(&q, &f, &z, &p(3)), Err(AdeError::ZeroDiscriminant));
    }

    #[test]
    fn small_scan_is_consistent() {
        let q = FieldContext::rationals();
        let cfg = ScanConfig { x: 4, ..Default::default() };
        let r = scan(&q, &a2(), &cfg).unwrap();
        assert_eq!(r.total as u128, count_sigma(&q, &a2(), 4));
        assert_eq!(r.classifier_disagreements, 0);
        assert!(r.tail_counts.windows(2).all(|w| w[1].combined <= w[0].combined));
        let again = scan(&q, &a2(), &cfg).unwrap();
        assert_eq!(r, again);
    }
}
