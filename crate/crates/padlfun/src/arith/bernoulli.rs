//! Bernoulli numbers, Bernoulli polynomials and generalized Bernoulli
//! numbers of quadratic characters.
//!
//! Even-index Bernoulli numbers come from the integer tangent-number
//! triangle (Brent-Harvey): T_n satisfies
//!     B_{2n} = (-1)^{n-1} * 2n * T_n / (2^{2n} (2^{2n} - 1)),
//! which keeps the whole computation in big integers. The interpolation
//! grids push n into the hundreds, where a rational-recurrence computation
//! would dominate the runtime. Results are memoized in-process and can be
//! persisted to a cache file (one line per entry, `n numerator/denominator`,
//! directory from PADL_CACHE_DIR, default `.padlfun-cache/`).

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::{rat, QuadChar, Rat};

struct State {
    bern: HashMap<u32, Rat>,
    tangent: Vec<BigUint>, // tangent[i] = T_{i+1}
    file_loaded: bool,
}

fn state() -> &'static RwLock<State> {
    static STATE: OnceLock<RwLock<State>> = OnceLock::new();
    STATE.get_or_init(|| {
        RwLock::new(State {
            bern: HashMap::new(),
            tangent: Vec::new(),
            file_loaded: false,
        })
    })
}

fn cache_path() -> PathBuf {
    let dir = std::env::var("PADL_CACHE_DIR").unwrap_or_else(|_| ".padlfun-cache".into());
    PathBuf::from(dir).join("bernoulli.txt")
}

fn load_cache_file(st: &mut State) {
    st.file_loaded = true;
    let Ok(text) = std::fs::read_to_string(cache_path()) else {
        return;
    };
    for line in text.lines() {
        let mut it = line.split_whitespace();
        let (Some(n), Some(frac)) = (it.next(), it.next()) else {
            continue;
        };
        let (Ok(n), Some((num, den))) = (n.parse::<u32>(), frac.split_once('/')) else {
            continue;
        };
        if let (Ok(num), Ok(den)) = (BigInt::from_str(num), BigInt::from_str(den)) {
            if den.is_positive() {
                st.bern.insert(n, Rat::new(num, den));
            }
        }
    }
}

/// Write every memoized Bernoulli number to the cache file.
pub fn persist_bernoulli_cache() -> std::io::Result<()> {
    let st = state().read().unwrap();
    let path = cache_path();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut entries: Vec<_> = st.bern.iter().collect();
    entries.sort_by_key(|(n, _)| **n);
    let mut out = std::fs::File::create(path)?;
    for (n, b) in entries {
        writeln!(out, "{} {}/{}", n, b.numer(), b.denom())?;
    }
    Ok(())
}

/// Tangent numbers T_1..T_n by the in-place integer triangle.
fn tangent_numbers(n: usize) -> Vec<BigUint> {
    let mut t: Vec<BigUint> = Vec::with_capacity(n);
    t.push(BigUint::one());
    for k in 2..=n {
        let prev = t[k - 2].clone();
        t.push(prev * BigUint::from(k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = &t[j - 2] * BigUint::from((j - k) as u64);
            let b = &t[j - 1] * BigUint::from((j - k + 2) as u64);
            t[j - 1] = a + b;
        }
    }
    t
}

fn bernoulli_even_from_tangent(st: &mut State, n: u32) -> Rat {
    let m = (n / 2) as usize;
    if st.tangent.len() < m {
        let target = m.max(st.tangent.len() * 3 / 2).max(16);
        st.tangent = tangent_numbers(target);
    }
    let t = BigInt::from(st.tangent[m - 1].clone());
    let two_2n = BigInt::one() << n; // 2^{2m} = 2^n
    let den = &two_2n * (&two_2n - BigInt::one());
    let mut num = t * BigInt::from(n);
    if m % 2 == 0 {
        num = -num;
    }
    Rat::new(num, den)
}

/// The n-th Bernoulli number, convention B_1 = -1/2.
pub fn bernoulli(n: u32) -> Rat {
    if n == 0 {
        return Rat::one();
    }
    if n == 1 {
        return rat(-1, 2);
    }
    if n % 2 == 1 {
        return Rat::zero();
    }
    {
        let st = state().read().unwrap();
        if let Some(b) = st.bern.get(&n) {
            return b.clone();
        }
    }
    let mut st = state().write().unwrap();
    if !st.file_loaded {
        load_cache_file(&mut st);
        if let Some(b) = st.bern.get(&n) {
            return b.clone();
        }
    }
    let b = bernoulli_even_from_tangent(&mut st, n);
    st.bern.insert(n, b.clone());
    b
}

/// Independent oracle: the defining recurrence sum_{j<n} C(n+1,j) B_j = 0 on
/// exact rationals. Quadratic cost; used by tests to check [`bernoulli`].
pub fn bernoulli_naive(n: u32) -> Rat {
    let mut b: Vec<Rat> = Vec::with_capacity(n as usize + 1);
    b.push(Rat::one());
    for m in 1..=n {
        // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
        let mut acc = Rat::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += Rat::from(binom.clone()) * bj;
            let j = j as u64;
            binom = binom * BigInt::from(m as u64 + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / rat(m as i64 + 1, 1));
    }
    b.pop().unwrap()
}

/// Value of the n-th Bernoulli polynomial at a rational point.
pub fn bernoulli_poly(n: u32, x: &Rat) -> Rat {
    // B_n(x) = sum C(n,i) B_i x^{n-i}
    let mut acc = Rat::zero();
    let mut binom = BigInt::one();
    let mut xpow = vec![Rat::one()];
    for _ in 0..n {
        xpow.push(xpow.last().unwrap() * x);
    }
    for i in 0..=n {
        acc += Rat::from(binom.clone()) * bernoulli(i) * &xpow[(n - i) as usize];
        if i < n {
            binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
        }
    }
    acc
}

/// Exact zeta(1-k) for k >= 1: -B_k/k at even k, -1/2 at k = 1, zero for
/// odd k >= 3.
pub fn zeta_neg(k: u32) -> Rat {
    assert!(k >= 1, "zeta_neg requires k >= 1");
    if k == 1 {
        return rat(-1, 2);
    }
    if k % 2 == 1 {
        return Rat::zero();
    }
    -bernoulli(k) / rat(k as i64, 1)
}

/// Generalized Bernoulli number B_{k,chi} of a quadratic character, via
/// B_{k,chi} = C^{k-1} sum_{a=1..C} chi(a) B_k(a/C) over the conductor C.
/// Satisfies L(1-k, chi) = -B_{k,chi}/k (and reduces to the zeta relation
/// for the trivial character).
pub fn gen_bernoulli_quad(k: u32, chi: &QuadChar) -> Rat {
    assert!(k >= 1, "gen_bernoulli_quad requires k >= 1");
    let c = chi.conductor();
    let mut acc = Rat::zero();
    for a in 1..=c {
        let ch = chi.eval(a as i64);
        if ch == 0 {
            continue;
        }
        let term = bernoulli_poly(k, &rat(a as i64, c as i64));
        acc += if ch > 0 { term } else { -term };
    }
    let scale = Rat::from(BigInt::from(c).pow(k - 1));
    scale * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ord_p_rat;
    use num_traits::ToPrimitive;

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), Rat::one());
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(3), Rat::zero());
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn matches_naive_recurrence() {
        for n in (0..=60).step_by(2) {
            assert_eq!(bernoulli(n), bernoulli_naive(n), "B_{n}");
        }
    }

    #[test]
    fn von_staudt_clausen_denominators() {
        for n in (2..=60u32).step_by(2) {
            let mut expected = BigInt::one();
            for q in 2..=(n + 1) as u64 {
                let prime = (2..q).all(|d| q % d != 0);
                if prime && n as u64 % (q - 1) == 0 {
                    expected *= BigInt::from(q);
                }
            }
            assert_eq!(bernoulli(n).denom(), &expected, "n={n}");
        }
    }

    #[test]
    fn bernoulli_poly_values() {
        assert_eq!(bernoulli_poly(1, &rat(1, 2)), Rat::zero());
        assert_eq!(bernoulli_poly(1, &rat(2, 5)), rat(-1, 10));
        assert_eq!(bernoulli_poly(2, &Rat::zero()), rat(1, 6));
    }

    #[test]
    fn bernoulli_poly_difference_identity() {
        // B_n(x+1) - B_n(x) = n x^{n-1}
        let samples = [rat(2, 5), rat(-3, 7), rat(11, 4)];
        for n in 1..=10u32 {
            for x in &samples {
                let lhs = bernoulli_poly(n, &(x + Rat::one())) - bernoulli_poly(n, x);
                let mut xp = Rat::one();
                for _ in 0..n - 1 {
                    xp *= x;
                }
                assert_eq!(lhs, rat(n as i64, 1) * xp);
            }
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_neg(2), rat(-1, 12));
        assert_eq!(zeta_neg(4), rat(1, 120));
        assert_eq!(zeta_neg(3), Rat::zero());
        assert_eq!(zeta_neg(1), rat(-1, 2));
        assert_eq!(zeta_neg(12), rat(691, 32760));
    }

    #[test]
    fn gen_bernoulli_values() {
        let chi4 = QuadChar::from_discriminant(-4).unwrap();
        assert_eq!(gen_bernoulli_quad(1, &chi4), rat(-1, 2));
        // trivial character reduces to the zeta relation, including k = 1
        let triv = QuadChar::from_discriminant(1).unwrap();
        for k in [1u32, 3, 5, 7, 2, 4] {
            assert_eq!(
                gen_bernoulli_quad(k, &triv),
                -rat(k as i64, 1) * zeta_neg(k)
            );
        }
        // class-number anchors: B_{1,chi_D} = -2h/w for D < 0
        let chi3 = QuadChar::from_discriminant(-3).unwrap();
        assert_eq!(gen_bernoulli_quad(1, &chi3), rat(-1, 3));
    }

    /// Float Hurwitz zeta at s = -1 by Euler-Maclaurin continuation,
    /// independent of the Bernoulli-polynomial route.
    fn hurwitz_neg1(x: f64) -> f64 {
        let m = 50u32;
        let mut s = 0.0;
        for n in 0..m {
            s += n as f64 + x; // (n+x)^{-s} at s = -1
        }
        let y = m as f64 + x;
        // + y^{1-s}/(s-1) + y^{-s}/2 + s*y^{-s-1}/12 at s = -1
        s - y * y / 2.0 + y / 2.0 - 1.0 / 12.0
    }

    #[test]
    fn gen_bernoulli_euler_maclaurin_oracle() {
        // L(1-k, chi) = C^{k-1} sum_a chi(a) zeta(1-k, a/C) with the Hurwitz
        // values produced by a numeric Euler-Maclaurin tail, then compared
        // against -B_{k,chi}/k.
        for d in [5i64, -3] {
            let chi = QuadChar::from_discriminant(d).unwrap();
            let c = chi.conductor() as i64;
            let mut l_float = 0.0;
            for a in 1..=c {
                let ch = chi.eval(a);
                if ch != 0 {
                    l_float += ch as f64 * hurwitz_neg1(a as f64 / c as f64);
                }
            }
            l_float *= c as f64; // C^{k-1}, k = 2
            let l_exact = -gen_bernoulli_quad(2, &chi) / rat(2, 1);
            assert!(
                (l_exact.to_f64().unwrap() - l_float).abs() < 1e-9,
                "D={d}: exact {l_exact} vs float {l_float}"
            );
        }
        // parity: chi_{-3} is odd, so B_{2,chi} vanishes
        let chi3 = QuadChar::from_discriminant(-3).unwrap();
        assert_eq!(gen_bernoulli_quad(2, &chi3), Rat::zero());
    }

    #[test]
    fn large_even_bernoulli_p_integrality() {
        // spot-check a big one against von Staudt-Clausen valuations
        let b = bernoulli(360);
        assert_eq!(ord_p_rat(&b, 37), Some(-1)); // 36 | 360
        assert_eq!(ord_p_rat(&b, 11), Some(-1)); // 10 | 360
    }
}
