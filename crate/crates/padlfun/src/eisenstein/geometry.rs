//! Genus-1 geometric verification routines: the truncated singular series
//! against its divisor-sum closed form, the twist-average identity over
//! residues mod 4p checked in floating point, and the exact tame character
//! orthogonality relations in cyclotomic-integer arithmetic.

use std::f64::consts::PI;

use num_traits::ToPrimitive;

use crate::arith::{divisor_power_sum, factorize_u64};
use crate::{Error, Result};

use super::coeffs::{cplus, HalfIntMatrix};
use super::qexp::QExpansion;

/// Truncated singular series and its error budget.
#[derive(Debug, Clone, Copy)]
pub struct SingularSeriesResult {
    pub value: f64,
    pub closed_form: f64,
    pub tail_bound: f64,
}

fn moebius(n: u64) -> i64 {
    let f = factorize_u64(n);
    for (_, e) in f.factors() {
        if *e > 1 {
            return 0;
        }
    }
    if f.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ramanujan sum c_q(h) = sum over d | gcd(q, h) of d mu(q/d).
fn ramanujan_sum(q: u64, h: u64) -> i64 {
    let g = num_integer::Integer::gcd(&q, &h);
    let mut acc = 0i64;
    for d in 1..=g {
        if g % d == 0 {
            acc += d as i64 * moebius(q / d);
        }
    }
    acc
}

fn zeta_float(k: u32) -> f64 {
    match k {
        4 => PI.powi(4) / 90.0,
        6 => PI.powi(6) / 945.0,
        _ => (1..200_000u64).map(|n| (n as f64).powi(-(k as i32))).sum(),
    }
}

/// Genus-1 singular series sum_{q <= C} q^{-k} c_q(h), which approaches
/// sigma_{k-1}(h)/(h^{k-1} zeta(k)) with tail below sum_{q > C} q^{1-k}.
pub fn singular_series_m1(h: u64, k: u32, cutoff: u64) -> Result<SingularSeriesResult> {
    if k < 4 || h == 0 || cutoff == 0 {
        return Err(Error::Domain("need k >= 4, h >= 1, cutoff >= 1".into()));
    }
    let mut value = 0.0;
    for q in 1..=cutoff {
        value += (q as f64).powi(-(k as i32)) * ramanujan_sum(q, h) as f64;
    }
    let sigma = divisor_power_sum(k - 1, h, None)
        .to_f64()
        .expect("desk-scale sigma fits f64");
    let closed_form = sigma / ((h as f64).powi(k as i32 - 1) * zeta_float(k));
    // |c_q(h)| <= phi(q) <= q, so the tail is below sum_{q>C} q^{1-k}
    let c = cutoff as f64;
    let tail_bound = c.powi(2 - k as i32) / (k as f64 - 2.0) + c.powi(1 - k as i32);
    Ok(SingularSeriesResult {
        value,
        closed_form,
        tail_bound,
    })
}

/// Result of the twist-average identity check.
#[derive(Debug, Clone, Copy)]
pub struct TwistReport {
    pub max_discrepancy: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Verify, coefficient by coefficient and in floating point, that
/// filtering a genus-1 expansion by the C^+ Euler package equals the
/// root-of-unity average (4p)^{-1} sum_{h0 mod 4p, p not dividing h0}
/// C^+(h0) sum_x e(-h0 x/4p) f(z + x/4p).
///
/// The root-of-unity sums run over a sign-symmetric table (so the paired
/// cancellations are exact in f64) and the rational coefficient magnitudes
/// multiply in only at the end, keeping the roundoff under the tolerance.
pub fn twist_average_check(
    f: &QExpansion,
    k: u32,
    p: u64,
    cutoff: u64,
    tol: f64,
) -> Result<TwistReport> {
    if f.genus() != 1 {
        return Err(Error::Domain("twist average check is genus-1 only".into()));
    }
    let modulus = 4 * p;
    // e(2 pi i r / 4p) with table[r + 2p] = -table[r] exactly
    let half: Vec<(f64, f64)> = (0..2 * p)
        .map(|r| {
            let th = 2.0 * PI * r as f64 / modulus as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let root = |r: u64| -> (f64, f64) {
        let r = r % modulus;
        if r < 2 * p {
            half[r as usize]
        } else {
            let (c, s) = half[(r - 2 * p) as usize];
            (-c, -s)
        }
    };
    let mut max_disc: f64 = 0.0;
    for n in 1..=cutoff.min(f.cutoff()) {
        let a_n = f.coeff_n(n).to_f64().expect("coefficient fits f64");
        // left: C^+ filter (drops p | n)
        let lhs = if n % p == 0 {
            0.0
        } else {
            let hn = HalfIntMatrix::genus1(n).unwrap();
            cplus(&hn, k, p)?.to_f64().unwrap() * a_n
        };
        // right: (4p)^{-1} sum_{h0} C^+(h0) sum_x e((n - h0)x/4p) a_n
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for h0 in 1..modulus {
            if h0 % p == 0 {
                continue;
            }
            let h0m = HalfIntMatrix::genus1(h0).unwrap();
            let cp = cplus(&h0m, k, p)?.to_f64().unwrap();
            let (mut sre, mut sim) = (0.0, 0.0);
            for x in 0..modulus {
                let (re, im) = root(((n % modulus) * x + (modulus - h0) * x) % modulus);
                sre += re;
                sim += im;
            }
            acc_re += cp * sre;
            acc_im += cp * sim;
        }
        let rhs_re = acc_re * a_n / modulus as f64;
        let rhs_im = acc_im * a_n / modulus as f64;
        let disc = ((lhs - rhs_re).powi(2) + rhs_im.powi(2)).sqrt();
        max_disc = max_disc.max(disc);
    }
    Ok(TwistReport {
        max_discrepancy: max_disc,
        tol,
        pass: max_disc < tol,
    })
}

/// Result of the exact tame-orthogonality verification.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    pub p: u64,
    pub cases_checked: usize,
    pub pass: bool,
}

fn primitive_root(p: u64) -> u64 {
    'outer: for g in 2..p {
        let mut x = 1u64;
        for _ in 0..p - 2 {
            x = x * g % p;
            if x == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("odd primes have primitive roots")
}

/// Coefficients of the n-th cyclotomic polynomial, by dividing x^n - 1 by
/// the cyclotomic polynomials of the proper divisors.
fn cyclotomic_poly(n: u64) -> Vec<i64> {
    if n == 1 {
        return vec![-1, 1];
    }
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_divide_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact division of integer polynomials (panics on nonzero remainder,
/// which cannot happen for cyclotomic factors).
fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let q = rem[i] / den[dd];
        quo[i - dd] = q;
        for (j, dc) in den.iter().enumerate() {
            rem[i - dd + j] -= q * dc;
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact cyclotomic division");
    quo
}

/// Remainder of an integer polynomial modulo a monic integer polynomial.
fn poly_rem(mut v: Vec<i64>, modpoly: &[i64]) -> Vec<i64> {
    let dd = modpoly.len() - 1;
    loop {
        while v.last() == Some(&0) {
            v.pop();
        }
        if v.len() <= dd {
            break;
        }
        let i = v.len() - 1;
        let q = v[i] / modpoly[dd];
        for (j, dc) in modpoly.iter().enumerate() {
            v[i - dd + j] -= q * dc;
        }
    }
    v.resize(dd, 0);
    v
}

/// Verify (1/phi(p)) sum_chi chibar(b) chi(c) = [b == c] over the tame
/// character group, exactly: character values are realized as powers of a
/// primitive (p-1)-st root of unity, sums as integer vectors reduced
/// modulo the (p-1)-st cyclotomic polynomial.
pub fn character_orthogonality(p: u64, v: u32) -> Result<OrthogonalityReport> {
    if v != 1 {
        return Err(Error::Domain("only tame level v = 1 is supported".into()));
    }
    crate::padic::check_odd_prime(p)?;
    let n = p - 1;
    let g = primitive_root(p);
    // index table: ind[a] with g^{ind[a]} == a mod p
    let mut ind = vec![0u64; p as usize];
    let mut x = 1u64;
    for e in 0..n {
        ind[x as usize] = e;
        x = x * g % p;
    }
    let phi = cyclotomic_poly(n);
    let mut cases = 0usize;
    for b in 1..p {
        for c in 1..p {
            // sum_i zeta^{i (ind c - ind b)} as a counting vector
            let diff = (ind[c as usize] + n - ind[b as usize]) % n;
            let mut vec_counts = vec![0i64; n as usize];
            for i in 0..n {
                vec_counts[((i * diff) % n) as usize] += 1;
            }
            let reduced = poly_rem(vec_counts, &phi);
            let expect_const = if b == c { n as i64 } else { 0 };
            let ok = reduced
                .iter()
                .enumerate()
                .all(|(i, &cv)| cv == if i == 0 { expect_const } else { 0 });
            if !ok {
                return Ok(OrthogonalityReport {
                    p,
                    cases_checked: cases,
                    pass: false,
                });
            }
            cases += 1;
        }
    }
    Ok(OrthogonalityReport {
        p,
        cases_checked: cases,
        pass: true,
    })
}
