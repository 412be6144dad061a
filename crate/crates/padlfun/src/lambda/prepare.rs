//! Weierstrass preparation over the truncated Iwasawa algebra: every
//! series G not vanishing mod (p^N, t^D) factors as p^mu * P * U with P a
//! distinguished polynomial (monic, lower coefficients divisible by p) and
//! U invertible. The lift runs the standard successive-approximation with
//! Weierstrass division against the current monic candidate; the update is
//! exact in the quotient ring, so the defect squares each round.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::series::{digits_of, undigits, IwasawaSeries};
use crate::arith::ord_p_int;
use crate::padic::PadicNum;
use crate::{Error, Result};

fn p_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Monic polynomial over Z_p whose non-leading coefficients are divisible
/// by p. Coefficients are stored mod p^{n_prec}, lowest degree first, with
/// the leading coefficient exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguishedPoly {
    p: u64,
    n_prec: u32,
    coeffs: Vec<BigUint>,
}

impl DistinguishedPoly {
    pub fn new(p: u64, n_prec: u32, coeffs: Vec<BigUint>) -> Result<DistinguishedPoly> {
        if coeffs.is_empty() {
            return Err(Error::Domain("empty polynomial".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(Error::Domain(
                "distinguished polynomial must be monic".into(),
            ));
        }
        let m = p_pow(p, n_prec);
        let coeffs: Vec<BigUint> = coeffs.into_iter().map(|c| c % &m).collect();
        for c in &coeffs[..coeffs.len() - 1] {
            if !(c % p).is_zero() {
                return Err(Error::Domain(
                    "non-leading coefficients must be divisible by p".into(),
                ));
            }
        }
        Ok(DistinguishedPoly { p, n_prec, coeffs })
    }

    /// The constant polynomial 1 (degree 0).
    pub fn one(p: u64, n_prec: u32) -> DistinguishedPoly {
        DistinguishedPoly {
            p,
            n_prec,
            coeffs: vec![BigUint::one()],
        }
    }

    /// Linear factor t - root for a root in pZ_p.
    pub fn linear_from_root(root: &PadicNum, n_prec: u32) -> Result<DistinguishedPoly> {
        let p = root.prime();
        if root.is_zero() {
            return DistinguishedPoly::new(p, n_prec, vec![BigUint::zero(), BigUint::one()]);
        }
        if root.valuation().unwrap_or(0) < 1 {
            return Err(Error::Domain("root must lie in pZ_p".into()));
        }
        let m = p_pow(p, n_prec);
        let r = root.residue(n_prec)?;
        DistinguishedPoly::new(p, n_prec, vec![(&m - r) % &m, BigUint::one()])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn n_prec(&self) -> u32 {
        self.n_prec
    }

    /// Degree = lambda invariant.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn raw_coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Coefficient i as a p-adic number at the stored precision.
    pub fn coeff(&self, i: usize) -> PadicNum {
        let r = &self.coeffs[i] % p_pow(self.p, self.n_prec);
        if r.is_zero() {
            PadicNum::approx_zero(self.p, self.n_prec as i64)
        } else {
            PadicNum::from_bigint(&BigInt::from(r), self.p, self.n_prec)
                .reduce_abs(self.n_prec as i64)
        }
    }

    /// ord_p of coefficient i; `None` when zero to working precision.
    pub fn coeff_ord(&self, i: usize) -> Option<u32> {
        let r = &self.coeffs[i] % p_pow(self.p, self.n_prec);
        if r.is_zero() {
            return None;
        }
        Some(ord_p_int(&BigInt::from(r), self.p).unwrap() as u32)
    }

    /// Exact polynomial evaluation (no t-adic tail).
    pub fn evaluate(&self, t0: &PadicNum) -> PadicNum {
        let mut acc = self.coeff(self.degree());
        for i in (0..self.degree()).rev() {
            acc = acc.mul(t0).add(&self.coeff(i));
        }
        acc
    }

    /// Product of distinguished polynomials is distinguished.
    pub fn mul(&self, other: &DistinguishedPoly) -> DistinguishedPoly {
        assert_eq!(self.p, other.p);
        let n = self.n_prec.min(other.n_prec);
        let m = p_pow(self.p, n);
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = (&out[i + j] + a * b) % &m;
            }
        }
        DistinguishedPoly {
            p: self.p,
            n_prec: n,
            coeffs: out,
        }
    }

    /// View as a truncated series of cutoff d (errors if degree >= d).
    pub fn as_series(&self, d: usize) -> Result<IwasawaSeries> {
        if self.coeffs.len() > d {
            return Err(Error::CutoffTooSmall(format!(
                "distinguished degree {} does not fit cutoff {}",
                self.degree(),
                d
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(d, BigUint::zero());
        Ok(IwasawaSeries::from_biguints(self.p, self.n_prec, coeffs))
    }

    pub fn coeffs_as_padic(&self) -> Vec<PadicNum> {
        (0..=self.degree()).map(|i| self.coeff(i)).collect()
    }

    /// JSON object {p, N, degree, coeffs: [[base-p digits]...]}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolyDto {
            p: self.p,
            n: self.n_prec,
            degree: self.degree(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| digits_of(c, self.p, self.n_prec))
                .collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DistinguishedPoly> {
        let dto: PolyDto = serde_json::from_value(v.clone())
            .map_err(|e| Error::Domain(format!("bad polynomial JSON: {e}")))?;
        if dto.coeffs.len() != dto.degree + 1 {
            return Err(Error::Domain("coefficient count != degree + 1".into()));
        }
        DistinguishedPoly::new(
            dto.p,
            dto.n,
            dto.coeffs.iter().map(|ds| undigits(ds, dto.p)).collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    degree: usize,
    coeffs: Vec<Vec<u64>>,
}

/// Result of Weierstrass preparation: G = p^mu * P * U.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub mu: u32,
    pub poly: DistinguishedPoly,
    pub unit: IwasawaSeries,
}

/// Weierstrass division: H = q * P + r with deg r < deg P, for P monic with
/// p-divisible lower coefficients. Exact in the quotient mod (p^N, t^D).
fn weierstrass_divmod(
    h: &IwasawaSeries,
    poly: &[BigUint],
    p: u64,
    n: u32,
) -> (IwasawaSeries, Vec<BigUint>) {
    let d = h.cutoff();
    let lam = poly.len() - 1;
    let m = p_pow(p, n);
    // b = t^lam - P (degree < lam, coefficients divisible by p)
    let b: Vec<BigUint> = poly[..lam].iter().map(|c| (&m - c) % &m).collect();
    let mut rem: Vec<BigUint> = h.raw_coeffs().to_vec();
    rem.iter_mut().for_each(|c| *c %= &m);
    let mut quo = vec![BigUint::zero(); d];
    loop {
        let high: Vec<BigUint> = rem[lam.min(rem.len())..].to_vec();
        if high.iter().all(|c| c.is_zero()) {
            break;
        }
        for (i, c) in high.iter().enumerate() {
            quo[i] = (&quo[i] + c) % &m;
        }
        rem.truncate(lam);
        rem.resize(d, BigUint::zero());
        // rem += b * high, truncated at t^D
        for (i, bc) in b.iter().enumerate() {
            if bc.is_zero() {
                continue;
            }
            for (j, hc) in high.iter().enumerate() {
                if i + j >= d || hc.is_zero() {
                    continue;
                }
                rem[i + j] = (&rem[i + j] + bc * hc) % &m;
            }
        }
    }
    rem.truncate(lam.max(1));
    (IwasawaSeries::from_biguints(p, n, quo), rem)
}

/// Weierstrass preparation of a truncated series: returns (mu, P, U) with
/// G = p^mu * P * U mod (p^{N-mu}, t^D), P distinguished of degree lambda =
/// the first unit-coefficient index of G/p^mu, U invertible.
pub fn weierstrass_prepare(g: &IwasawaSeries) -> Result<Prepared> {
    let p = g.prime();
    let n0 = g.n_prec();
    let d = g.cutoff();
    assert!(
        g.is_effectively_uniform(),
        "preparation requires a series with uniform coefficient precision"
    );
    // mu = min coefficient valuation
    let mut mu = u32::MAX;
    for j in 0..d {
        if let Some(o) = ord_of(&g.raw_coeffs()[j], p, n0) {
            mu = mu.min(o);
        }
    }
    if mu == u32::MAX {
        return Err(Error::PrecisionExhausted(
            "series is zero mod (p^N, t^D); cannot prepare".into(),
        ));
    }
    let n = n0 - mu;
    if n == 0 {
        return Err(Error::PrecisionExhausted(
            "no digits left after removing the p-power content".into(),
        ));
    }
    let pmu = p_pow(p, mu);
    let reduced: Vec<BigUint> = g.raw_coeffs().iter().map(|c| c / &pmu).collect();
    let g = IwasawaSeries::from_biguints(p, n, reduced);
    // lambda = first unit coefficient
    let lam = (0..d)
        .find(|&j| !(&g.raw_coeffs()[j] % p).is_zero())
        .ok_or_else(|| {
            Error::CutoffTooSmall(format!("no unit coefficient below the cutoff D = {d}"))
        })?;
    if lam == 0 {
        return Ok(Prepared {
            mu,
            poly: DistinguishedPoly::one(p, n),
            unit: g,
        });
    }
    if lam >= d {
        return Err(Error::CutoffTooSmall("lambda >= D".into()));
    }
    let m = p_pow(p, n);
    // t-adic workspace: products dropped beyond the cutoff would otherwise
    // re-enter the low coefficients through the division (each pass gains
    // one power of p but loses lam degrees), so give the iteration enough
    // room that anything falling off the end carries >= p^n.
    let d_work = d + lam * (n as usize + 1);
    let g_work = {
        let mut c = g.raw_coeffs().to_vec();
        c.resize(d_work, BigUint::zero());
        IwasawaSeries::from_biguints(p, n, c)
    };
    // initial approximation: P = t^lam, U = high part of G
    let mut poly: Vec<BigUint> = vec![BigUint::zero(); lam + 1];
    poly[lam] = BigUint::one();
    let mut unit_coeffs: Vec<BigUint> = g_work.raw_coeffs()[lam..].to_vec();
    unit_coeffs.resize(d_work, BigUint::zero());
    let mut unit = IwasawaSeries::from_biguints(p, n, unit_coeffs);

    for _round in 0..(n + 2) {
        // defect E = G - P*U
        let p_series = {
            let mut c = poly.clone();
            c.resize(d_work, BigUint::zero());
            IwasawaSeries::from_biguints(p, n, c)
        };
        let e = g_work.sub(&p_series.mul(&unit));
        if e.is_zero_mod_precision() {
            let dp = DistinguishedPoly::new(p, n, poly)?;
            return Ok(Prepared {
                mu,
                poly: dp,
                unit: unit.truncate_t(d),
            });
        }
        let h = e.mul(&unit.invert()?);
        let (q, r) = weierstrass_divmod(&h, &poly, p, n);
        for (i, rc) in r.iter().enumerate() {
            poly[i] = (&poly[i] + rc) % &m;
        }
        unit = unit.add(&q.mul(&unit));
    }
    Err(Error::PrecisionExhausted(
        "Weierstrass lift failed to converge".into(),
    ))
}

fn ord_of(c: &BigUint, p: u64, n: u32) -> Option<u32> {
    let r = c % p_pow(p, n);
    if r.is_zero() {
        None
    } else {
        Some(ord_p_int(&BigInt::from(r), p).unwrap() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(p: u64, n: u32, vals: &[i64]) -> IwasawaSeries {
        use num_integer::Integer;
        let m = BigInt::from(p_pow(p, n));
        let coeffs = vals
            .iter()
            .map(|&v| BigInt::from(v).mod_floor(&m).to_biguint().unwrap())
            .collect();
        IwasawaSeries::from_biguints(p, n, coeffs)
    }

    #[test]
    fn prepare_linear() {
        // G = p + t -> mu = 0, P = t + p, U = 1
        let p = 5;
        let g = series(p, 8, &[5, 1, 0, 0, 0, 0]);
        let pr = weierstrass_prepare(&g).unwrap();
        assert_eq!(pr.mu, 0);
        assert_eq!(pr.poly.degree(), 1);
        assert_eq!(pr.poly.raw_coeffs()[0], BigUint::from(5u32));
        assert_eq!(pr.unit, IwasawaSeries::one(p, 8, 6));
    }

    #[test]
    fn prepare_unit_constant() {
        let p = 7;
        let g = series(p, 6, &[3, 7, 14, 0]);
        let pr = weierstrass_prepare(&g).unwrap();
        assert_eq!((pr.mu, pr.poly.degree()), (0, 0));
        assert_eq!(pr.unit, g);
    }

    #[test]
    fn prepare_recovers_random_products() {
        // construct U0 (unit) * P0 (distinguished, deg <= 3), factor back
        let p = 5u64;
        let n = 8u32;
        let d = 12usize;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _case in 0..100 {
            let lam = (rng() % 4) as usize;
            let mut pc: Vec<BigUint> = (0..lam)
                .map(|_| BigUint::from(p) * BigUint::from(rng() % 78125))
                .collect();
            pc.push(BigUint::one());
            let p0 = DistinguishedPoly::new(p, n, pc).unwrap();
            let mut uc: Vec<BigUint> = (0..d).map(|_| BigUint::from(rng() % 625)).collect();
            // force unit constant term
            if (&uc[0] % p).is_zero() {
                uc[0] += 1u32;
            }
            uc.resize(d + lam, BigUint::zero()); // room for the exact product
            let u0 = IwasawaSeries::from_biguints(p, n, uc);
            let mu0 = (rng() % 2) as u32;
            let g = p0
                .as_series(d + lam)
                .unwrap()
                .mul(&u0)
                .scalar_mul(&PadicNum::from_i64((p as i64).pow(mu0), p, n + mu0));
            let pr = weierstrass_prepare(&g).unwrap();
            assert_eq!(pr.mu, mu0, "mu mismatch");
            assert_eq!(pr.poly.degree(), lam, "lambda mismatch");
            // uniqueness: coefficients agree mod p^{n - mu}
            let keep = n - mu0;
            let m = p_pow(p, keep);
            for i in 0..=lam {
                assert_eq!(
                    &pr.poly.raw_coeffs()[i] % &m,
                    &p0.raw_coeffs()[i] % &m,
                    "coefficient {i}"
                );
            }
            // and the factorization multiplies back
            let back = pr
                .poly
                .as_series(d + lam)
                .unwrap()
                .mul(&pr.unit)
                .scalar_mul(&PadicNum::from_i64((p as i64).pow(pr.mu), p, n));
            let gm = g.reduce_n(keep);
            let bm = back.reduce_n(keep);
            assert_eq!(gm.raw_coeffs(), bm.raw_coeffs());
        }
    }

    #[test]
    fn errors_surface() {
        let p = 5;
        let zero = IwasawaSeries::zero(p, 4, 6);
        assert!(matches!(
            weierstrass_prepare(&zero),
            Err(Error::PrecisionExhausted(_))
        ));
        // all coefficients divisible by p with nothing unit below D
        let g = series(p, 4, &[5, 25, 10, 5]);
        // mu = 1 strips one power; then 1, 5, 2, 1 has lambda = 0
        let pr = weierstrass_prepare(&g).unwrap();
        assert_eq!((pr.mu, pr.poly.degree()), (1, 0));
    }

    #[test]
    fn composition_preserves_lambda_degree() {
        // P((t - p)/(1+p)) prepares back to the same degree
        use crate::lambda::series::compose_poly;
        let p = 5u64;
        let n = 10u32;
        let d = 12usize;
        let poly = DistinguishedPoly::new(
            p,
            n,
            vec![BigUint::from(25u32), BigUint::from(10u32), BigUint::one()],
        )
        .unwrap();
        let inv = PadicNum::from_i64(6, p, n).invert().unwrap();
        let arg = [PadicNum::from_i64(-5, p, n).mul(&inv), inv.clone()];
        let composed = compose_poly(&poly.coeffs_as_padic(), &arg, p);
        let lead_inv = composed.last().unwrap().invert().unwrap();
        let monic: Vec<PadicNum> = composed.iter().map(|c| c.mul(&lead_inv)).collect();
        let mut coeffs: Vec<PadicNum> = monic;
        coeffs.resize(d, PadicNum::exact_zero(p));
        let series = IwasawaSeries::from_padics(p, n, &coeffs).unwrap();
        let pr = weierstrass_prepare(&series).unwrap();
        assert_eq!(pr.mu, 0);
        assert_eq!(pr.poly.degree(), poly.degree());
    }

    #[test]
    fn poly_json_round_trip() {
        let p0 = DistinguishedPoly::new(5, 6, vec![BigUint::from(10u32), BigUint::one()]).unwrap();
        let j = p0.to_json();
        let back = DistinguishedPoly::from_json(&j).unwrap();
        assert_eq!(p0, back);
    }
}
