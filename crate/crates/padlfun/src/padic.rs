//! Capped-precision p-adic numbers (the Q_p subfield of the Tate field)
//! and the p-adic special functions: Teichmüller lift, one-unit part,
//! p-adic logarithm, the exponent s(a) with <a> = (1+p)^{s(a)}, and the
//! Iwasawa coordinate t_k = (1+p)^k - 1.
//!
//! Values follow the absolute-precision model: a nonzero element is stored
//! as p^val * unit with the unit known modulo p^N (N significant digits, so
//! the value is known modulo p^{val+N}). Approximate zeros remember the
//! modulus O(p^A) below which nothing is known. Printing is byte-compatible
//! with PARI's digit layout, e.g. `25 + 24*37 + 24*37^2 + O(37^5)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{ord_p_int, Rat};
use crate::{Error, Result};

/// Reject p = 2 and composites at construction; everything downstream
/// assumes an odd prime.
pub fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("p = {p} is not an odd prime")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Exact zero (infinite precision).
    ExactZero,
    /// Zero to precision: value lies in p^abs * Z_p, nothing known below.
    ApproxZero { abs: i64 },
    /// p^val * unit, unit in [1, p^digits) coprime to p.
    Unit {
        val: i64,
        unit: BigUint,
        digits: u32,
    },
}

/// A p-adic number with tracked precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNum {
    p: u64,
    repr: Repr,
}

fn p_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

impl PadicNum {
    pub fn exact_zero(p: u64) -> PadicNum {
        PadicNum {
            p,
            repr: Repr::ExactZero,
        }
    }

    /// Zero known only modulo p^abs.
    pub fn approx_zero(p: u64, abs: i64) -> PadicNum {
        PadicNum {
            p,
            repr: Repr::ApproxZero { abs },
        }
    }

    pub fn one(p: u64, digits: u32) -> PadicNum {
        PadicNum::from_bigint(&BigInt::one(), p, digits)
    }

    /// Construct from an integer with `digits` significant digits.
    pub fn from_bigint(x: &BigInt, p: u64, digits: u32) -> PadicNum {
        PadicNum::from_rat(&Rat::from(x.clone()), p, digits)
    }

    pub fn from_i64(x: i64, p: u64, digits: u32) -> PadicNum {
        PadicNum::from_bigint(&BigInt::from(x), p, digits)
    }

    /// p-adic expansion of an exact rational to `digits` significant digits
    /// (absolute precision val + digits). Denominators divisible by p give
    /// negative valuation.
    pub fn from_rat(x: &Rat, p: u64, digits: u32) -> PadicNum {
        assert!(digits > 0, "need at least one digit");
        if x.is_zero() {
            return PadicNum::exact_zero(p);
        }
        let vn = ord_p_int(x.numer(), p).unwrap() as i64;
        let vd = ord_p_int(x.denom(), p).unwrap() as i64;
        let val = vn - vd;
        let modulus = p_pow(p, digits);
        let modulus_int = BigInt::from(modulus.clone());
        let num_unit = x.numer() / BigInt::from(p).pow(vn as u32);
        let den_unit = x.denom() / BigInt::from(p).pow(vd as u32);
        let num_red = num_unit.mod_floor(&modulus_int).to_biguint().unwrap();
        let den_red = den_unit.mod_floor(&modulus_int).to_biguint().unwrap();
        let den_inv = mod_inverse(&den_red, &modulus).expect("denominator unit is invertible");
        let unit = num_red * den_inv % &modulus;
        PadicNum {
            p,
            repr: Repr::Unit { val, unit, digits },
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// True if no nonzero digit is known (exact or approximate zero).
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation; `None` for (exact or approximate) zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Number of known significant digits (relative precision).
    pub fn digits(&self) -> Option<u32> {
        match &self.repr {
            Repr::Unit { digits, .. } => Some(*digits),
            _ => None,
        }
    }

    /// Absolute precision: the value is known modulo p^{abs_precision()}.
    /// `None` for the exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::ApproxZero { abs } => Some(*abs),
            Repr::Unit { val, digits, .. } => Some(val + *digits as i64),
        }
    }

    /// The unit part as an integer in [1, p^digits). Errors on zero.
    pub fn unit_part(&self) -> Result<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Ok(unit),
            _ => Err(Error::Domain("zero has no unit part".into())),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(&self.repr, Repr::Unit { val: 0, .. })
    }

    /// Residue in [0, p^k) of a p-adic integer modulo p^k. Errors when not
    /// known to that precision or of negative valuation.
    pub fn residue(&self, k: u32) -> Result<BigUint> {
        match &self.repr {
            Repr::ExactZero => Ok(BigUint::zero()),
            Repr::ApproxZero { abs } => {
                if *abs >= k as i64 {
                    Ok(BigUint::zero())
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "residue mod p^{k} of O(p^{abs})"
                    )))
                }
            }
            Repr::Unit { val, unit, digits } => {
                if *val < 0 {
                    return Err(Error::Domain("negative valuation".into()));
                }
                if val + (*digits as i64) < (k as i64) {
                    return Err(Error::PrecisionExhausted(format!(
                        "residue mod p^{k} of a value known mod p^{}",
                        val + *digits as i64
                    )));
                }
                Ok(unit * p_pow(self.p, *val as u32) % p_pow(self.p, k))
            }
        }
    }

    /// Truncate to at most `digits` significant digits.
    pub fn truncate(&self, digits: u32) -> PadicNum {
        match &self.repr {
            Repr::Unit {
                val,
                unit,
                digits: d,
            } if *d > digits => PadicNum {
                p: self.p,
                repr: Repr::Unit {
                    val: *val,
                    unit: unit % p_pow(self.p, digits),
                    digits,
                },
            },
            _ => self.clone(),
        }
    }

    /// Reduce to absolute precision `abs`. Becomes an approximate zero if
    /// nothing remains.
    pub fn reduce_abs(&self, abs: i64) -> PadicNum {
        match &self.repr {
            Repr::ExactZero => PadicNum::approx_zero(self.p, abs),
            Repr::ApproxZero { abs: a } => PadicNum::approx_zero(self.p, (*a).min(abs)),
            Repr::Unit { val, unit, digits } => {
                let cur_abs = val + *digits as i64;
                if abs >= cur_abs {
                    return self.clone();
                }
                if abs <= *val {
                    return PadicNum::approx_zero(self.p, abs);
                }
                let keep = (abs - val) as u32;
                let new_unit = unit % p_pow(self.p, keep);
                if new_unit.is_zero() {
                    PadicNum::approx_zero(self.p, abs)
                } else {
                    PadicNum {
                        p: self.p,
                        repr: Repr::Unit {
                            val: *val,
                            unit: new_unit,
                            digits: keep,
                        },
                    }
                }
            }
        }
    }

    /// Renormalize a raw (val, residue mod p^digits) pair: strip p-powers
    /// from the residue into the valuation.
    fn normalize(p: u64, val: i64, residue: BigUint, digits: u32) -> PadicNum {
        if residue.is_zero() {
            return PadicNum::approx_zero(p, val + digits as i64);
        }
        let shift = ord_p_int(&BigInt::from(residue.clone()), p).unwrap() as u32;
        if shift >= digits {
            return PadicNum::approx_zero(p, val + digits as i64);
        }
        let unit = residue / p_pow(p, shift);
        PadicNum {
            p,
            repr: Repr::Unit {
                val: val + shift as i64,
                unit: unit % p_pow(p, digits - shift),
                digits: digits - shift,
            },
        }
    }

    pub fn add(&self, other: &PadicNum) -> PadicNum {
        assert_eq!(self.p, other.p);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => other.clone(),
            (_, Repr::ExactZero) => self.clone(),
            (Repr::ApproxZero { abs }, _) => other.reduce_abs(*abs),
            (_, Repr::ApproxZero { abs }) => self.reduce_abs(*abs),
            (
                Repr::Unit {
                    val: v1,
                    unit: u1,
                    digits: d1,
                },
                Repr::Unit {
                    val: v2,
                    unit: u2,
                    digits: d2,
                },
            ) => {
                let abs = (v1 + *d1 as i64).min(v2 + *d2 as i64);
                let base = (*v1).min(*v2);
                let window = (abs - base) as u32;
                if window == 0 {
                    return PadicNum::approx_zero(p, abs);
                }
                let modulus = p_pow(p, window);
                let t1 = u1 * p_pow(p, (v1 - base) as u32) % &modulus;
                let t2 = u2 * p_pow(p, (v2 - base) as u32) % &modulus;
                PadicNum::normalize(p, base, (t1 + t2) % &modulus, window)
            }
        }
    }

    pub fn neg(&self) -> PadicNum {
        match &self.repr {
            Repr::Unit { val, unit, digits } => {
                let modulus = p_pow(self.p, *digits);
                PadicNum {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: &modulus - unit,
                        digits: *digits,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &PadicNum) -> PadicNum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNum) -> PadicNum {
        assert_eq!(self.p, other.p);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => PadicNum::exact_zero(p),
            (Repr::ApproxZero { abs }, rhs) | (rhs, Repr::ApproxZero { abs }) => match rhs {
                Repr::Unit { val, .. } => PadicNum::approx_zero(p, abs + val),
                Repr::ApproxZero { abs: b } => PadicNum::approx_zero(p, abs + b),
                Repr::ExactZero => unreachable!(),
            },
            (
                Repr::Unit {
                    val: v1,
                    unit: u1,
                    digits: d1,
                },
                Repr::Unit {
                    val: v2,
                    unit: u2,
                    digits: d2,
                },
            ) => {
                let digits = (*d1).min(*d2);
                let unit = u1 * u2 % p_pow(p, digits);
                PadicNum {
                    p,
                    repr: Repr::Unit {
                        val: v1 + v2,
                        unit,
                        digits,
                    },
                }
            }
        }
    }

    pub fn invert(&self) -> Result<PadicNum> {
        match &self.repr {
            Repr::Unit { val, unit, digits } => {
                let modulus = p_pow(self.p, *digits);
                let inv = mod_inverse(unit, &modulus).expect("unit is invertible");
                Ok(PadicNum {
                    p: self.p,
                    repr: Repr::Unit {
                        val: -val,
                        unit: inv,
                        digits: *digits,
                    },
                })
            }
            Repr::ExactZero => Err(Error::Domain("division by exact zero".into())),
            Repr::ApproxZero { abs } => Err(Error::PrecisionExhausted(format!(
                "division by zero-to-precision O({}^{})",
                self.p, abs
            ))),
        }
    }

    pub fn div(&self, other: &PadicNum) -> Result<PadicNum> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow_i64(&self, e: i64) -> Result<PadicNum> {
        if e < 0 {
            return self.invert()?.pow_i64(-e);
        }
        let mut acc = PadicNum::from_i64(1, self.p, self.digits().unwrap_or(1));
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Congruence test modulo p^abs.
    pub fn congruent(&self, other: &PadicNum, abs: i64) -> bool {
        let d = self.sub(other);
        match d.repr {
            Repr::ExactZero => true,
            Repr::ApproxZero { abs: a } => a >= abs,
            Repr::Unit { val, .. } => val >= abs,
        }
    }

    /// Base-p digits from the valuation upward, for rendering.
    fn digit_list(&self) -> Option<(i64, Vec<u64>, i64)> {
        match &self.repr {
            Repr::Unit { val, unit, digits } => {
                let mut out = Vec::with_capacity(*digits as usize);
                let mut rest = unit.clone();
                let pb = BigUint::from(self.p);
                for _ in 0..*digits {
                    let (q, r) = rest.div_rem(&pb);
                    out.push(r.to_u64().unwrap());
                    rest = q;
                }
                Some((*val, out, val + *digits as i64))
            }
            _ => None,
        }
    }

    /// PARI-style rendering, e.g. `25 + 24*37 + 24*37^2 + O(37^5)` or
    /// `36*37^-1 + 28 + 3*37 + O(37^4)`.
    pub fn to_pari_string(&self) -> String {
        let p = self.p;
        match &self.repr {
            Repr::ExactZero => "0".into(),
            Repr::ApproxZero { abs } => format!("O({p}^{abs})"),
            Repr::Unit { .. } => {
                let (val, digits, abs) = self.digit_list().unwrap();
                let mut terms: Vec<String> = Vec::new();
                for (i, d) in digits.iter().enumerate() {
                    if *d == 0 {
                        continue;
                    }
                    let e = val + i as i64;
                    let term = match e {
                        0 => format!("{d}"),
                        1 => {
                            if *d == 1 {
                                format!("{p}")
                            } else {
                                format!("{d}*{p}")
                            }
                        }
                        _ => {
                            if *d == 1 {
                                format!("{p}^{e}")
                            } else {
                                format!("{d}*{p}^{e}")
                            }
                        }
                    };
                    terms.push(term);
                }
                terms.push(format!("O({p}^{abs})"));
                terms.join(" + ")
            }
        }
    }
}

impl std::fmt::Display for PadicNum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_pari_string())
    }
}

/// Modular inverse by extended Euclid; `None` if not coprime.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&m).to_biguint().unwrap())
}

/// Teichmüller lift: the unique (p-1)-st root of unity congruent to a mod
/// p, computed by iterating x -> x^p to stabilization.
pub fn teichmuller(a: &BigInt, p: u64, digits: u32) -> PadicNum {
    let modulus = p_pow(p, digits);
    let mut x = a
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .unwrap();
    assert!(
        !(x.clone() % p).is_zero(),
        "teichmuller requires gcd(a, p) = 1"
    );
    let pb = BigUint::from(p);
    for _ in 0..digits {
        let next = x.modpow(&pb, &modulus);
        if next == x {
            break;
        }
        x = next;
    }
    PadicNum {
        p,
        repr: Repr::Unit {
            val: 0,
            unit: x,
            digits,
        },
    }
}

/// Teichmüller lift of a PadicNum unit.
pub fn teichmuller_of(a: &PadicNum) -> Result<PadicNum> {
    if !a.is_unit() {
        return Err(Error::Domain("teichmuller requires a unit".into()));
    }
    let unit = a.unit_part()?.clone();
    Ok(teichmuller(
        &BigInt::from(unit),
        a.prime(),
        a.digits().unwrap(),
    ))
}

/// One-unit part <a> = a / omega(a), congruent to 1 mod p.
pub fn angle(a: &PadicNum) -> Result<PadicNum> {
    if !a.is_unit() {
        return Err(Error::Domain("angle requires a unit".into()));
    }
    a.div(&teichmuller_of(a)?)
}

/// p-adic logarithm of a 1-unit, by the alternating series truncated where
/// every discarded term has valuation >= the working absolute precision.
pub fn padic_log(u: &PadicNum) -> Result<PadicNum> {
    let p = u.prime();
    let one = PadicNum::one(p, u.digits().unwrap_or(1));
    let x = u.sub(&one);
    match x.valuation() {
        None => {
            return Ok(PadicNum::approx_zero(
                p,
                x.abs_precision().unwrap_or(i64::MAX),
            ))
        }
        Some(v) if v < 1 => return Err(Error::Domain("padic_log requires u == 1 mod p".into())),
        _ => {}
    }
    let n_target = u.abs_precision().unwrap();
    // terms x^n/n have ord >= n - log_p(n); stop once that clears the target
    let mut bound = 1u32;
    while (bound as i64) - (bound.ilog(p as u32) as i64) <= n_target {
        bound += 1;
    }
    let guard = bound.ilog(p as u32) + 1;
    let work = (n_target.max(1) as u32) + guard;
    let x = x.truncate(work);
    let mut acc = PadicNum::approx_zero(p, n_target);
    let mut xpow = PadicNum::one(p, work);
    for n in 1..=bound {
        xpow = xpow.mul(&x);
        let term = xpow.div(&PadicNum::from_i64(n as i64, p, work))?;
        acc = if n % 2 == 1 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    Ok(acc.reduce_abs(n_target))
}

/// p-adic exponential of x with ord(x) >= 1 (the series inverse of the
/// logarithm, used for round-trip checks).
pub fn padic_exp(x: &PadicNum) -> Result<PadicNum> {
    let p = x.prime();
    match x.valuation() {
        None => return Ok(PadicNum::one(p, 1).reduce_abs(x.abs_precision().unwrap_or(1))),
        Some(v) if v < 1 => return Err(Error::Domain("padic_exp requires ord >= 1".into())),
        _ => {}
    }
    let target = x.abs_precision().unwrap();
    // term x^n/n! has ord >= n - (n-1)/(p-1) > 0; stop when >= target
    let mut bound = 1u32;
    loop {
        let ord = bound as i64 - (bound as i64 - 1) / (p as i64 - 1);
        if ord >= target {
            break;
        }
        bound += 1;
    }
    let guard = 2 * (bound.ilog(p as u32) + 1);
    let work = target.max(1) as u32 + guard;
    let mut acc = PadicNum::one(p, work);
    let mut term = PadicNum::one(p, work);
    for n in 1..=bound {
        term = term.mul(x).div(&PadicNum::from_i64(n as i64, p, work))?;
        acc = acc.add(&term);
    }
    Ok(acc.reduce_abs(target))
}

/// u^s for a 1-unit u and exponent s in Z_p, via exp(s log u).
pub fn pow_zp(u: &PadicNum, s: &PadicNum) -> Result<PadicNum> {
    if s.is_zero() {
        return Ok(PadicNum::one(u.prime(), u.digits().unwrap_or(1)));
    }
    if s.valuation().unwrap_or(0) < 0 {
        return Err(Error::Domain("exponent must lie in Z_p".into()));
    }
    padic_exp(&padic_log(u)?.mul(s))
}

/// The exponent s with <a> = (1+p)^s, i.e. log<a> / log(1+p).
pub fn s_exponent(a: &PadicNum) -> Result<PadicNum> {
    let p = a.prime();
    let la = padic_log(&angle(a)?)?;
    let lp = padic_log(&PadicNum::from_i64(
        1 + p as i64,
        p,
        a.digits().unwrap_or(1) + 1,
    ))?;
    la.div(&lp)
}

/// Iwasawa coordinate t_k = (1+p)^k - 1 to `digits` significant digits.
/// Satisfies ord_p(t_k) = ord_p(k) + 1.
pub fn t_coordinate(k: i64, p: u64, digits: u32) -> PadicNum {
    if k == 0 {
        return PadicNum::exact_zero(p);
    }
    let ordk = ord_p_int(&BigInt::from(k), p).unwrap() as u32;
    let work = digits + ordk + 1;
    let base = PadicNum::from_i64(1 + p as i64, p, work);
    let pw = base.pow_i64(k).expect("unit power");
    pw.sub(&PadicNum::one(p, work)).truncate(digits)
}

/// A tame p-adic character: a power of the Teichmüller character,
/// optionally twisted by a quadratic character of conductor prime to p.
#[derive(Debug, Clone)]
pub struct BranchChar {
    p: u64,
    j: u32,
    twist: Option<crate::arith::QuadChar>,
}

impl BranchChar {
    pub fn new(p: u64, j: i64, twist: Option<crate::arith::QuadChar>) -> Result<BranchChar> {
        check_odd_prime(p)?;
        if let Some(t) = &twist {
            if t.conductor() % p == 0 {
                return Err(Error::Domain("twist conductor must be prime to p".into()));
            }
        }
        Ok(BranchChar {
            p,
            j: j.rem_euclid(p as i64 - 1) as u32,
            twist,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Exponent j with tame part omega^j, reduced mod p-1.
    pub fn exponent(&self) -> u32 {
        self.j
    }

    pub fn twist(&self) -> Option<&crate::arith::QuadChar> {
        self.twist.as_ref()
    }

    /// chi(-1) as +1/-1.
    pub fn parity(&self) -> i32 {
        let tame = if self.j % 2 == 0 { 1 } else { -1 };
        tame * self.twist.as_ref().map_or(1, |t| t.parity())
    }

    /// Evaluate at an integer: omega(a)^j times the twist value; zero when
    /// a shares a factor with p or the twist conductor.
    pub fn eval(&self, a: i64, digits: u32) -> PadicNum {
        let tw = match &self.twist {
            Some(t) => t.eval(a),
            None => 1,
        };
        if tw == 0 || a.rem_euclid(self.p as i64) == 0 {
            return PadicNum::exact_zero(self.p);
        }
        let om = teichmuller(&BigInt::from(a), self.p, digits);
        let val = om.pow_i64(self.j as i64).expect("unit power");
        if tw < 0 {
            val.neg()
        } else {
            val
        }
    }
}
