//! Exact big-integer and rational arithmetic: Bernoulli numbers and
//! polynomials, generalized Bernoulli numbers of quadratic characters,
//! Kronecker symbols, integer factorization, divisor power sums.

mod bernoulli;
mod factor;
mod quadchar;

pub use bernoulli::{
    bernoulli, bernoulli_naive, bernoulli_poly, gen_bernoulli_quad, persist_bernoulli_cache,
    zeta_neg,
};
pub use factor::{factorize, factorize_u64, is_prime_u64, is_probable_prime, Factorization};
pub use quadchar::QuadChar;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// p-adic valuation of a nonzero integer. `None` for zero.
pub fn ord_p_int(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut cur = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&cur, &p);
        if r.is_zero() {
            v += 1;
            cur = q;
        } else {
            return Some(v);
        }
    }
}

/// p-adic valuation of a nonzero rational. `None` for zero.
pub fn ord_p_rat(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let vn = ord_p_int(x.numer(), p).unwrap() as i64;
    let vd = ord_p_int(x.denom(), p).unwrap() as i64;
    Some(vn - vd)
}

/// Kronecker symbol (a/n), the fully multiplicative extension of the Jacobi
/// symbol to all integers, including n = 2, n = 0 and negative n.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let (mut a, mut n) = (a as i128, n as i128);
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        match a.rem_euclid(8) {
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // n odd and positive from here on: Jacobi with reciprocity.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            match n.rem_euclid(8) {
                3 | 5 => result = -result,
                _ => {}
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Sum of e-th powers of the divisors of n, optionally restricted to
/// divisors not divisible by `omit_p`.
pub fn divisor_power_sum(e: u32, n: u64, omit_p: Option<u64>) -> BigUint {
    assert!(n >= 1, "divisor_power_sum requires n >= 1");
    let fact = factorize_u64(n);
    let mut total = BigUint::one();
    for (l, v) in fact.factors() {
        let l_u64: u64 = l.try_into().expect("u64 input has u64 prime factors");
        if omit_p == Some(l_u64) {
            continue; // only the j = 0 divisor survives at this prime
        }
        let le = l.pow(e);
        let mut geom = BigUint::one();
        let mut pw = BigUint::one();
        for _ in 0..*v {
            pw *= &le;
            geom += &pw;
        }
        total *= geom;
    }
    total
}
