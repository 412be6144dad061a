//! Truncated elements of Z_p[[t]]: arithmetic mod (p^N, t^D), inversion,
//! composition with polynomial arguments, and evaluation at points of pZ_p
//! with an explicit precision report.
//!
//! Precision contract: coefficient j of a series is correct modulo
//! p^{min(N, tail - j)}. Freshly constructed integral series have
//! tail = infinity (represented by u32::MAX); composing with a polynomial
//! argument whose constant term lies in pZ_p folds the discarded t^D tail
//! into low-degree coefficients and sets tail = D. The contract is closed
//! under ring operations (the minimum of the operands' data survives), and
//! evaluation at a point of valuation v reports min(N, tail, D*v) absolute
//! digits.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::padic::{mod_inverse, PadicNum};
use crate::{Error, Result};

const NO_TAIL: u32 = u32::MAX;

/// Truncated power series over Z_p with uniform coefficient precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IwasawaSeries {
    p: u64,
    n_prec: u32,
    coeffs: Vec<BigUint>,
    tail: u32,
}

fn p_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

impl IwasawaSeries {
    /// Series with the given coefficients (reduced mod p^N), full tail.
    pub fn from_biguints(p: u64, n_prec: u32, mut coeffs: Vec<BigUint>) -> IwasawaSeries {
        let m = p_pow(p, n_prec);
        for c in &mut coeffs {
            *c %= &m;
        }
        IwasawaSeries {
            p,
            n_prec,
            coeffs,
            tail: NO_TAIL,
        }
    }

    /// Series from p-adic integer coefficients. Requires every coefficient
    /// to be known modulo p^{n_prec} and have valuation >= 0.
    pub fn from_padics(p: u64, n_prec: u32, coeffs: &[PadicNum]) -> Result<IwasawaSeries> {
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            out.push(c.residue(n_prec)?);
        }
        Ok(IwasawaSeries::from_biguints(p, n_prec, out))
    }

    pub fn zero(p: u64, n_prec: u32, d: usize) -> IwasawaSeries {
        IwasawaSeries {
            p,
            n_prec,
            coeffs: vec![BigUint::zero(); d],
            tail: NO_TAIL,
        }
    }

    pub fn one(p: u64, n_prec: u32, d: usize) -> IwasawaSeries {
        let mut s = IwasawaSeries::zero(p, n_prec, d);
        s.coeffs[0] = BigUint::one();
        s
    }

    pub fn constant(c: &PadicNum, n_prec: u32, d: usize) -> Result<IwasawaSeries> {
        let mut s = IwasawaSeries::zero(c.prime(), n_prec, d);
        s.coeffs[0] = c.residue(n_prec)?;
        Ok(s)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn n_prec(&self) -> u32 {
        self.n_prec
    }

    /// t-adic cutoff D (number of stored coefficients).
    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    /// Tail marker: coefficient j is correct mod p^{min(N, tail-j)}.
    pub fn tail(&self) -> u32 {
        self.tail
    }

    pub fn has_full_tail(&self) -> bool {
        self.tail == NO_TAIL
    }

    /// True when the tail marker does not bite: every stored coefficient
    /// carries the full N digits.
    pub fn is_effectively_uniform(&self) -> bool {
        self.tail == NO_TAIL || self.tail as usize >= self.coeffs.len() + self.n_prec as usize
    }

    /// Guaranteed correct digits of coefficient j.
    pub fn coeff_prec(&self, j: usize) -> u32 {
        if self.tail == NO_TAIL {
            self.n_prec
        } else {
            self.n_prec.min(self.tail.saturating_sub(j as u32))
        }
    }

    /// Coefficient j as a p-adic number carrying its honest precision.
    pub fn coeff(&self, j: usize) -> PadicNum {
        let prec = self.coeff_prec(j);
        if prec == 0 {
            return PadicNum::approx_zero(self.p, 0);
        }
        let r = &self.coeffs[j] % p_pow(self.p, prec);
        if r.is_zero() {
            PadicNum::approx_zero(self.p, prec as i64)
        } else {
            PadicNum::from_bigint(&BigInt::from(r), self.p, prec).reduce_abs(prec as i64)
        }
    }

    pub fn raw_coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_zero_mod_precision(&self) -> bool {
        (0..self.coeffs.len()).all(|j| {
            let prec = self.coeff_prec(j);
            (&self.coeffs[j] % p_pow(self.p, prec)).is_zero()
        })
    }

    fn merged_meta(&self, other: &IwasawaSeries) -> (u32, usize, u32) {
        assert_eq!(self.p, other.p, "mixed primes");
        (
            self.n_prec.min(other.n_prec),
            self.cutoff().min(other.cutoff()),
            self.tail.min(other.tail),
        )
    }

    pub fn add(&self, other: &IwasawaSeries) -> IwasawaSeries {
        let (n, d, tail) = self.merged_meta(other);
        let m = p_pow(self.p, n);
        let coeffs = (0..d)
            .map(|j| (&self.coeffs[j] + &other.coeffs[j]) % &m)
            .collect();
        IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs,
            tail,
        }
    }

    pub fn sub(&self, other: &IwasawaSeries) -> IwasawaSeries {
        let (n, d, tail) = self.merged_meta(other);
        let m = p_pow(self.p, n);
        let coeffs = (0..d)
            .map(|j| (&self.coeffs[j] + (&m - &other.coeffs[j] % &m)) % &m)
            .collect();
        IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs,
            tail,
        }
    }

    pub fn neg(&self) -> IwasawaSeries {
        IwasawaSeries::zero(self.p, self.n_prec, self.cutoff()).sub(self)
    }

    pub fn mul(&self, other: &IwasawaSeries) -> IwasawaSeries {
        let (n, d, tail) = self.merged_meta(other);
        let m = p_pow(self.p, n);
        let mut coeffs = vec![BigUint::zero(); d];
        for (i, a) in self.coeffs.iter().take(d).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(d - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = (&coeffs[i + j] + a * b) % &m;
            }
        }
        IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs,
            tail,
        }
    }

    /// Multiply by a p-adic integer scalar.
    pub fn scalar_mul(&self, c: &PadicNum) -> IwasawaSeries {
        if c.is_zero() {
            let abs = c.abs_precision().unwrap_or(i64::MAX);
            let n = self.n_prec.min(abs.max(0) as u32);
            return IwasawaSeries {
                p: self.p,
                n_prec: n,
                coeffs: vec![BigUint::zero(); self.cutoff()],
                tail: self.tail,
            };
        }
        let abs = c.abs_precision().unwrap();
        let n = self.n_prec.min(abs.max(1) as u32);
        let m = p_pow(self.p, n);
        let cres = c.residue(n).expect("scalar with val >= 0");
        let coeffs = self.coeffs.iter().map(|a| a * &cres % &m).collect();
        IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs,
            tail: self.tail,
        }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn invert(&self) -> Result<IwasawaSeries> {
        let c0 = &self.coeffs[0];
        if (c0 % self.p).is_zero() {
            return Err(Error::Domain(
                "series inversion requires a unit constant term".into(),
            ));
        }
        let n = self.n_prec;
        let m = p_pow(self.p, n);
        let inv0 = mod_inverse(&(c0 % &m), &m).expect("unit constant");
        let d = self.cutoff();
        let mut out = vec![BigUint::zero(); d];
        out[0] = inv0.clone();
        for j in 1..d {
            let mut acc = BigUint::zero();
            for i in 1..=j {
                if self.coeffs[i].is_zero() || out[j - i].is_zero() {
                    continue;
                }
                acc = (acc + &self.coeffs[i] * &out[j - i]) % &m;
            }
            // out[j] = -inv0 * acc
            acc = acc * &inv0 % &m;
            if !acc.is_zero() {
                acc = &m - acc;
            }
            out[j] = acc;
        }
        Ok(IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs: out,
            tail: self.tail,
        })
    }

    /// Shorten the t-adic cutoff.
    pub fn truncate_t(&self, d: usize) -> IwasawaSeries {
        let mut s = self.clone();
        s.coeffs.truncate(d);
        s
    }

    /// Lower the coefficient precision.
    pub fn reduce_n(&self, n: u32) -> IwasawaSeries {
        if n >= self.n_prec {
            return self.clone();
        }
        let m = p_pow(self.p, n);
        IwasawaSeries {
            p: self.p,
            n_prec: n,
            coeffs: self.coeffs.iter().map(|c| c % &m).collect(),
            tail: self.tail,
        }
    }

    /// Mark that coefficient j is only trusted mod p^{min(N, tail-j)}.
    pub fn with_tail(&self, tail: u32) -> IwasawaSeries {
        let mut s = self.clone();
        s.tail = s.tail.min(tail);
        s
    }

    /// Substitute a polynomial argument (degree <= 2, constant term in
    /// pZ_p) into the series. The discarded t^D tail has value divisible by
    /// p^{D-j} at coefficient j, recorded via the tail marker.
    pub fn compose_poly_arg(&self, arg: &[PadicNum]) -> Result<IwasawaSeries> {
        if arg.len() > 3 {
            return Err(Error::Domain("composition argument degree > 2".into()));
        }
        match arg.first() {
            Some(c0) if !c0.is_zero() && c0.valuation().unwrap_or(0) < 1 => {
                return Err(Error::Domain(
                    "composition argument must map 0 into pZ_p".into(),
                ));
            }
            _ => {}
        }
        let d = self.cutoff();
        let n = self.n_prec;
        let arg_series = IwasawaSeries::from_padics(self.p, n, arg).map(|s| {
            let mut t = s;
            t.coeffs.resize(d, BigUint::zero());
            t
        })?;
        // Horner from the top coefficient
        let mut acc = IwasawaSeries::constant(&self.coeff_raw(d - 1), n, d)?;
        for j in (0..d - 1).rev() {
            acc = acc.mul(&arg_series);
            acc.coeffs[0] = (&acc.coeffs[0] + &self.coeffs[j]) % p_pow(self.p, n);
        }
        acc.tail = acc.tail.min(self.tail).min(d as u32);
        Ok(acc)
    }

    /// Coefficient j at the full stored precision (internal helper).
    fn coeff_raw(&self, j: usize) -> PadicNum {
        let r = &self.coeffs[j] % p_pow(self.p, self.n_prec);
        if r.is_zero() {
            PadicNum::approx_zero(self.p, self.n_prec as i64)
        } else {
            PadicNum::from_bigint(&BigInt::from(r), self.p, self.n_prec)
                .reduce_abs(self.n_prec as i64)
        }
    }

    /// Evaluate at t0 in pZ_p. The result carries
    /// min(N, tail, D*ord(t0), abs_prec(t0)) absolute digits.
    pub fn evaluate(&self, t0: &PadicNum) -> Result<PadicNum> {
        assert_eq!(self.p, t0.prime());
        let d = self.cutoff();
        if t0.is_zero() {
            let cap = t0.abs_precision().unwrap_or(i64::MAX);
            return Ok(self.coeff(0).reduce_abs(cap.min(self.coeff_prec(0) as i64)));
        }
        let v0 = t0.valuation().unwrap();
        if v0 < 1 {
            return Err(Error::Domain("evaluation point must lie in pZ_p".into()));
        }
        let mut report = (self.n_prec as i64)
            .min(d as i64 * v0)
            .min(t0.abs_precision().unwrap_or(i64::MAX));
        if self.tail != NO_TAIL {
            report = report.min(self.tail as i64);
        }
        let mut acc = self.coeff_raw(d - 1);
        for j in (0..d - 1).rev() {
            acc = acc.mul(t0).add(&self.coeff_raw(j));
        }
        Ok(acc.reduce_abs(report))
    }

    /// JSON object {p, N, D, tail, coeffs: [[base-p digits]...]}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesDto::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<IwasawaSeries> {
        let dto: SeriesDto = serde_json::from_value(v.clone())
            .map_err(|e| Error::Domain(format!("bad series JSON: {e}")))?;
        dto.into_series()
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDto {
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "D")]
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<u32>,
    coeffs: Vec<Vec<u64>>,
}

impl From<&IwasawaSeries> for SeriesDto {
    fn from(s: &IwasawaSeries) -> SeriesDto {
        SeriesDto {
            p: s.p,
            n: s.n_prec,
            d: s.cutoff(),
            tail: if s.tail == NO_TAIL {
                None
            } else {
                Some(s.tail)
            },
            coeffs: s
                .coeffs
                .iter()
                .map(|c| digits_of(c, s.p, s.n_prec))
                .collect(),
        }
    }
}

impl SeriesDto {
    fn into_series(self) -> Result<IwasawaSeries> {
        if self.coeffs.len() != self.d {
            return Err(Error::Domain("coefficient count != D".into()));
        }
        let coeffs = self.coeffs.iter().map(|ds| undigits(ds, self.p)).collect();
        let mut s = IwasawaSeries::from_biguints(self.p, self.n, coeffs);
        if let Some(t) = self.tail {
            s = s.with_tail(t);
        }
        Ok(s)
    }
}

pub(crate) fn digits_of(c: &BigUint, p: u64, n: u32) -> Vec<u64> {
    use num_traits::ToPrimitive;
    let mut out = Vec::with_capacity(n as usize);
    let mut rest = c.clone();
    let pb = BigUint::from(p);
    for _ in 0..n {
        let (q, r) = num_integer::Integer::div_rem(&rest, &pb);
        out.push(r.to_u64().unwrap());
        rest = q;
    }
    out
}

pub(crate) fn undigits(ds: &[u64], p: u64) -> BigUint {
    let mut acc = BigUint::zero();
    for d in ds.iter().rev() {
        acc = acc * p + *d;
    }
    acc
}

/// Multiply two exact polynomials with PadicNum coefficients.
pub fn poly_mul(a: &[PadicNum], b: &[PadicNum], p: u64) -> Vec<PadicNum> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![PadicNum::exact_zero(p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Compose an exact polynomial with a polynomial argument: f(arg(t)),
/// coefficients exact up to the PadicNum precision.
pub fn compose_poly(f: &[PadicNum], arg: &[PadicNum], p: u64) -> Vec<PadicNum> {
    let mut acc: Vec<PadicNum> = vec![f.last().expect("nonempty poly").clone()];
    for c in f.iter().rev().skip(1) {
        acc = poly_mul(&acc, arg, p);
        acc[0] = acc[0].add(c);
    }
    acc
}
