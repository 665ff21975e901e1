//! Prime sieving and factorisation of machine-sized integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// All primes `<= n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// A nontrivial factor of the odd composite `n` (Pollard–Brent).
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn push_factors(mut n: u64, out: &mut Vec<u64>) {
    for p in SMALL_PRIMES {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
    }
    push_rho(n, out);
}

fn push_rho(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    push_rho(d, out);
    push_rho(n / d, out);
}

/// Prime factorisation of `n > 0` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut primes = Vec::new();
    push_factors(n, &mut primes);
    collect(primes)
}

fn collect(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Outcome of factoring with a work budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(u64, u32)>,
    /// Cofactor left unfactored (1 when the factorisation is complete).
    pub cofactor: BigUint,
    /// The cofactor is a probable prime too large for `u64`.
    pub cofactor_is_prime: bool,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// Squarefreeness of the whole input is decided by the known part.
    pub fn decides_squarefree(&self) -> bool {
        self.cofactor.is_one() || self.cofactor_is_prime
    }
}

fn probable_prime_big(n: &BigUint) -> bool {
    if let Some(s) = n.to_u64() {
        return is_prime_u64(s);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Factors `n` by trial division over `trial_primes`, then completes the
/// factorisation of the cofactor when it is at most `budget` or a probable
/// prime. Otherwise the cofactor is returned unfactored.
pub fn factor_with_budget(n: &BigUint, trial_primes: &[u64], budget: &BigUint) -> Factorization {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut n = n.clone();
    let mut primes = Vec::new();
    for &p in trial_primes {
        if n.is_one() {
            break;
        }
        let bp = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            primes.push(p);
            n = q;
        }
    }
    let done = |primes: Vec<u64>| Factorization {
        factors: collect(primes),
        cofactor: BigUint::one(),
        cofactor_is_prime: false,
    };
    if n.is_one() {
        return done(primes);
    }
    if let Some(small) = n.to_u64() {
        if &n <= budget || is_prime_u64(small) {
            push_factors(small, &mut primes);
            return done(primes);
        }
    }
    // a prime above 2^64 cannot be recorded as u64, so it stays as the cofactor
    let cofactor_is_prime = n.to_u64().is_none() && probable_prime_big(&n);
    Factorization { factors: collect(primes), cofactor: n, cofactor_is_prime }
}

/// Whether `n` is a probable prime (exact below 2^64).
pub fn is_probable_prime(n: &BigUint) -> bool {
    !n.is_zero() && !n.is_one() && probable_prime_big(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorisations() {
        assert_eq!(factor_u64(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factor_u64(400), vec![(2, 4), (5, 2)]);
        assert_eq!(factor_u64(1), vec![]);
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(factor_u64(big), vec![(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn primality() {
        let sieve = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }
}
