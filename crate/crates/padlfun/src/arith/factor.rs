//! Integer factorization: trial division, deterministic Miller-Rabin for
//! the desk-scale range, and Pollard rho with Brent cycling for the large
//! mass-table entries (~2.6e19).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TRIAL_BOUND: u64 = 1_000_000;

/// Complete prime factorization with sign, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    sign: i8,
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// Multiply the factorization back out (without the sign).
    pub fn product(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    /// gp-style rendering: `1` for the empty factorization, otherwise
    /// `[p1, e1; p2, e2; ...]`.
    pub fn to_gp_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        let rows: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| format!("{}, {}", p, e))
            .collect();
        format!("[{}]", rows.join("; "))
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
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

/// Deterministic Miller-Rabin for u64 (witness set valid to 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin on big integers with the fixed witness set
/// {2,...,41}: deterministic below 3.317e24, which covers every table
/// entry; a strong probable-prime test beyond that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(n64) = n.to_u64() {
        return is_prime_u64(n64);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho, Brent variant, on u128 arithmetic via BigUint for safety at
/// the ~2^65 scale. Returns a nontrivial factor or None for this parameter.
fn pollard_brent(n: &BigUint, c: u32) -> Option<BigUint> {
    let n_big = n.clone();
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % &n_big;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let (mut x, mut ys) = (y.clone(), y.clone());
    let m = 128u64;
    let mut g = BigUint::one();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = q * diff % &n_big;
            }
            g = q.gcd(&n_big);
            k += m;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == n_big {
        // backtrack one step at a time
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(&n_big);
            if !g.is_one() {
                break;
            }
        }
    }
    if g.is_one() || g == n_big {
        None
    } else {
        Some(g)
    }
}

/// Complete factorization of a positive integer. Errors with the composite
/// cofactor if rho gives up, rather than returning a wrong answer.
pub fn factorize(n: &BigUint) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Domain("factorize requires n >= 1".into()));
    }
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();

    // trial division; native u128 arithmetic once the cofactor fits
    // (while it does not, d^2 <= TRIAL_BOUND^2 < 2^127 < rest always)
    let mut small: Option<u128> = rest.to_u128();
    let mut d = 2u64;
    while d <= TRIAL_BOUND {
        match small {
            Some(ref mut s) => {
                if (d as u128) * (d as u128) > *s {
                    break;
                }
                let mut e = 0u32;
                while *s % d as u128 == 0 {
                    *s /= d as u128;
                    e += 1;
                }
                if e > 0 {
                    factors.push((BigUint::from(d), e));
                }
            }
            None => {
                let mut e = 0u32;
                while (&rest % d).is_zero() {
                    rest /= d;
                    e += 1;
                }
                if e > 0 {
                    factors.push((BigUint::from(d), e));
                    small = rest.to_u128();
                }
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if let Some(s) = small {
        rest = BigUint::from(s);
    }

    // rho on whatever survives
    let mut stack = vec![rest];
    let mut found: Vec<BigUint> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            found.push(m);
            continue;
        }
        let mut split = None;
        for c in 1..40u32 {
            if let Some(g) = pollard_brent(&m, c) {
                split = Some(g);
                break;
            }
        }
        match split {
            Some(g) => {
                stack.push(&m / &g);
                stack.push(g);
            }
            None => return Err(Error::IncompleteFactorization { cofactor: m }),
        }
    }
    for p in found {
        match factors.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => factors.push((p, 1)),
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let result = Factorization { sign: 1, factors };
    debug_assert_eq!(&result.product(), n);
    Ok(result)
}

/// Factorization of a u64 (always succeeds: trial division + rho cover it).
pub fn factorize_u64(n: u64) -> Factorization {
    factorize(&BigUint::from(n)).expect("u64 factorization cannot give up")
}
