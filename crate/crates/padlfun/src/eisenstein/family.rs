//! Interpolating coefficient families: for an index h with p not dividing
//! det(2h) and an even branch k0 mod p-1, the p-regular Fourier
//! coefficients k -> a_h^{(p)}(k) are assembled as a numerator series S^E
//! over a distinguished polynomial P^E in t = (1+p)^k - 1.
//!
//! The numerator collects: the elementary Iwasawa function of
//! 2 det(h)^{k-(m+1)/2} [C_h-collapsed] prod M(h, l^{-k}); at even genus
//! the measure-side series of L(1-k+m/2, psi_h) composed at
//! (1+t)(1+p)^{-m/2-1} - 1 and the inverted regularizer u*_{c_h}; the
//! inverted unit parts of the zeta branches composed at (1+t)(1+p)^{-1}-1
//! and (1+t)^2 (1+p)^{-2i-1} - 1; and the factors (1 - c_h^k-series),
//! (1 - c_h^{2k-2i}-series). The denominator is the product of the
//! composed distinguished polynomials (re-prepared after the degree-2
//! substitution, whose mod-p reduction is not distinguished), times the
//! forced linear factor at k = m/2 when omega^{k-m/2} psi_h is trivial.

use crate::arith::rat;
use crate::lambda::{
    compose_poly, weierstrass_prepare, DistinguishedPoly, IwasawaSeries, Prepared,
};
use crate::measures::{
    iwasawa_series, quad_l_series, unit_power_series, SeriesMethod, SeriesParams,
};
use crate::padic::{check_odd_prime, t_coordinate, PadicNum};
use crate::{Error, Result};

use super::coeffs::{p_regular_coeff, psi_and_conductor, HalfIntMatrix, LocalDensity};

/// Audit trail of the family's constituent factors.
#[derive(Debug, Clone)]
pub struct FamilyAudit {
    /// Elementary factor series (the det/density/conductor package).
    pub m_factor: IwasawaSeries,
    /// Inverted regularizer u*_{c_h} (even genus only).
    pub u_star_ch: Option<IwasawaSeries>,
    /// Composed measure-side series of the psi_h L-value (even genus).
    pub quad_g: Option<IwasawaSeries>,
    /// Composed inverted unit parts of the zeta branches.
    pub zeta_units: Vec<IwasawaSeries>,
    /// The regularizing factors 1 - c_h^{k}-series, 1 - c_h^{2k-2i}-series.
    pub c_factors: Vec<IwasawaSeries>,
    /// Whether the forced linear factor at k = m/2 is present.
    pub delta: bool,
    /// Build-time verification: (weight, matched, absolute digits).
    pub verification: Vec<(i64, bool, i64)>,
}

/// A p-adic family of p-regular Fourier coefficients on one branch.
#[derive(Debug, Clone)]
pub struct CoeffFamily {
    pub h: HalfIntMatrix,
    pub p: u64,
    pub c_h: u64,
    /// Branch residue k0 mod p-1 (even).
    pub branch: i64,
    pub params: SeriesParams,
    pub numerator: IwasawaSeries,
    pub denominator: DistinguishedPoly,
    pub density: LocalDensity,
    pub audit: FamilyAudit,
}

fn coprimality_modulus(h: &HalfIntMatrix, p: u64) -> u64 {
    // c_h must avoid p and the primes of the elementary divisors of h
    // (plus the conductor at even genus, which divides det(2h))
    match h {
        HalfIntMatrix::Genus1 { h } => p * h,
        HalfIntMatrix::Genus2 { .. } => p * h.det2(),
    }
}

/// True when c^{p-1} == 1 mod p^2, i.e. <c> == 1 mod p^2. Such bases have
/// non-unit s_c, which inflates the distinguished part of the regularizer
/// with zeros in ramified extensions; the default picker avoids them.
fn is_wieferich_base(c: u64, p: u64) -> bool {
    let p2 = (p * p) as u128;
    let mut x = 1u128;
    for _ in 0..p - 1 {
        x = x * (c as u128 % p2) % p2;
    }
    x == 1
}

/// True when c generates (Z/p)^*. With a primitive root, the zero of the
/// factor 1 - c^k at k = 0 lands only on the branch where it cancels the
/// Kubota-Leopoldt pole, so no removable zeros leak into denominators.
fn is_primitive_root(c: u64, p: u64) -> bool {
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    if c % p == 0 {
        return false;
    }
    let fact = crate::arith::factorize_u64(p - 1);
    fact.factors().iter().all(|(q, _)| {
        let q: u64 = q.try_into().unwrap();
        powmod(c, (p - 1) / q) != 1
    })
}

/// Pick the default regularizer: the smallest c > 1 that is coprime to p
/// and the primes of h, a primitive root mod p, not a Wieferich-type base
/// (so <c> generates the 1-units), and outside the kernel of
/// omega^{k0-m/2} psi_h whenever that character is nontrivial (so the
/// regularizer is invertible). Each condition keeps a removable or
/// ramified zero out of the assembled denominator.
fn pick_c_h(h: &HalfIntMatrix, p: u64, k0: i64) -> Result<u64> {
    let modulus = coprimality_modulus(h, p);
    let m = h.genus();
    let psi = if m % 2 == 0 {
        Some(psi_and_conductor(h)?)
    } else {
        None
    };
    let e = (k0 - (m / 2) as i64).rem_euclid(p as i64 - 1) as u32;
    let mut c = 2u64;
    loop {
        if num_integer::Integer::gcd(&c, &modulus) == 1
            && is_primitive_root(c, p)
            && !is_wieferich_base(c, p)
        {
            match &psi {
                None => return Ok(c),
                Some(psi) => {
                    let trivial_char = psi.is_trivial() && e == 0;
                    if trivial_char {
                        return Ok(c);
                    }
                    // need omega(c)^e psi(c) != 1, i.e. c^e != psi(c) mod p
                    let mut pw = 1u64;
                    for _ in 0..e {
                        pw = pw * (c % p) % p;
                    }
                    let psi_c = psi.eval(c as i64);
                    let kernel = (psi_c == 1 && pw == 1) || (psi_c == -1 && pw == p - 1);
                    if !kernel {
                        return Ok(c);
                    }
                }
            }
        }
        c += 1;
        if c > modulus + p {
            return Err(Error::Domain("no admissible c_h found".into()));
        }
    }
}

/// One zeta-branch package composed at a polynomial argument: the
/// inverted unit part, the distinguished part of the composed polynomial,
/// and the scalar absorbed by monic normalization.
struct ZetaPackage {
    unit_inv: IwasawaSeries,
    extra_unit_inv: Option<IwasawaSeries>,
    poly: DistinguishedPoly,
    scalar: PadicNum,
}

fn zeta_package(
    p: u64,
    branch_j: i64,
    c: u64,
    params: SeriesParams,
    arg: &[PadicNum],
) -> Result<ZetaPackage> {
    let zb = iwasawa_series(p, branch_j, c, params, SeriesMethod::Interpolation)?;
    let prepared: &Prepared = zb.prepared.as_ref().ok_or_else(|| {
        Error::Domain(format!(
            "zeta branch {branch_j} vanishes identically (parity mismatch)"
        ))
    })?;
    if prepared.mu != 0 {
        return Err(Error::Domain(
            "zeta branch has positive mu-invariant; reciprocal leaves the Iwasawa algebra".into(),
        ));
    }
    let unit_inv = prepared.unit.compose_poly_arg(arg)?.invert()?;
    if prepared.poly.degree() == 0 {
        return Ok(ZetaPackage {
            unit_inv,
            extra_unit_inv: None,
            poly: DistinguishedPoly::one(p, params.n),
            scalar: PadicNum::one(p, params.n + 4),
        });
    }
    let composed = compose_poly(&prepared.poly.coeffs_as_padic(), arg, p);
    let lead = composed.last().unwrap().clone();
    let lead_inv = lead.invert()?;
    let monic: Vec<PadicNum> = composed.iter().map(|c| c.mul(&lead_inv)).collect();
    if arg.len() <= 2 {
        // linear substitution keeps the polynomial distinguished
        let coeffs = monic
            .iter()
            .map(|c| c.residue(params.n))
            .collect::<Result<Vec<_>>>()?;
        let poly = DistinguishedPoly::new(p, params.n, coeffs)?;
        Ok(ZetaPackage {
            unit_inv,
            extra_unit_inv: None,
            poly,
            scalar: lead_inv,
        })
    } else {
        // degree-2 substitution: the composed polynomial reduces mod p to
        // t^lambda (t+2)^lambda, so split off the distinguished part again
        let mut series_coeffs = monic;
        series_coeffs.resize(params.d.max(series_coeffs.len()), PadicNum::exact_zero(p));
        let as_series = IwasawaSeries::from_padics(p, params.n, &series_coeffs)?;
        let pr = weierstrass_prepare(&as_series)?;
        if pr.mu != 0 {
            return Err(Error::Domain(
                "monic composition cannot carry p-content".into(),
            ));
        }
        let extra = pr.unit.truncate_t(params.d).invert()?;
        Ok(ZetaPackage {
            unit_inv,
            extra_unit_inv: Some(extra),
            poly: pr.poly,
            scalar: lead_inv,
        })
    }
}

/// Assemble the coefficient family of h on the branch k0 (even residue
/// mod p-1). `c_h_override` forces the regularizer; `density` supplies
/// the local factors (the genus-1 divisor density reproduces classical
/// elliptic coefficients).
pub fn build_family(
    h: &HalfIntMatrix,
    p: u64,
    c_h_override: Option<u64>,
    k0: i64,
    density: &LocalDensity,
    params: SeriesParams,
) -> Result<CoeffFamily> {
    check_odd_prime(p)?;
    let m = h.genus();
    if h.det2() % p == 0 {
        return Err(Error::Domain("p divides det(2h)".into()));
    }
    if k0.rem_euclid(2) != 0 {
        return Err(Error::Domain("branch residue must be even".into()));
    }
    density.check_support(h)?;
    let k0 = k0.rem_euclid(p as i64 - 1);
    let c_h = match c_h_override {
        Some(c) => {
            if c < 2 || num_integer::Integer::gcd(&c, &coprimality_modulus(h, p)) != 1 {
                return Err(Error::Domain(format!(
                    "c_h = {c} must exceed 1 and be coprime to p and the primes of h"
                )));
            }
            c
        }
        None => pick_c_h(h, p, k0)?,
    };
    let n = params.n;
    let d = params.d;
    let work = n + 4;

    // elementary factor: 2 det(h)^{k-(m+1)/2}-package times the density
    let mut m_factor = match h {
        HalfIntMatrix::Genus1 { h: idx } => {
            unit_power_series(&rat(*idx as i64, 1), 1, -1, k0, p, params)?
        }
        HalfIntMatrix::Genus2 { .. } => {
            let psi = psi_and_conductor(h)?;
            let f_half = rat(psi.square_part() as i64, 2);
            unit_power_series(&f_half, 2, -3, k0, p, params)?
        }
    };
    m_factor = m_factor.scalar_mul(&PadicNum::from_i64(2, p, work));
    for (l, poly) in density.factors() {
        let mut acc = IwasawaSeries::zero(p, n, d);
        for (j, mj) in poly.iter().enumerate() {
            let term = unit_power_series(&rat(*l as i64, 1), -(j as i64), 0, k0, p, params)?;
            acc = acc.add(&term.scalar_mul(&PadicNum::from_bigint(mj, p, work)));
        }
        m_factor = m_factor.mul(&acc);
    }

    let mut numerator = m_factor.clone();
    let mut denominator = DistinguishedPoly::one(p, n);
    let mut scalar = PadicNum::one(p, work);
    let mut audit = FamilyAudit {
        m_factor,
        u_star_ch: None,
        quad_g: None,
        zeta_units: Vec::new(),
        c_factors: Vec::new(),
        delta: false,
        verification: Vec::new(),
    };

    // even genus: the psi_h L-part
    if m % 2 == 0 {
        let psi = psi_and_conductor(h)?;
        let quad = quad_l_series(p, &psi, m, c_h, k0, params)?;
        let gamma = PadicNum::from_i64(1 + p as i64, p, work)
            .pow_i64((m / 2) as i64 + 1)?
            .invert()?;
        let arg_h = [gamma.sub(&PadicNum::one(p, work)), gamma];
        let g_comp = quad.g.compose_poly_arg(&arg_h)?;
        let u_star = quad.u_reg.invert()?;
        numerator = numerator.mul(&g_comp).mul(&u_star);
        if quad.delta {
            let tau = t_coordinate(quad.zero_exponent, p, n);
            denominator = denominator.mul(&DistinguishedPoly::linear_from_root(&tau, n)?);
            audit.delta = true;
        }
        audit.quad_g = Some(g_comp);
        audit.u_star_ch = Some(u_star);
    }

    // main zeta branch at (1+t)(1+p)^{-1} - 1
    let beta = PadicNum::from_i64(1 + p as i64, p, work).invert()?;
    let arg1 = [beta.sub(&PadicNum::one(p, work)), beta];
    let pack1 = zeta_package(p, k0 - 1, c_h, params, &arg1)?;
    numerator = numerator.mul(&pack1.unit_inv);
    audit.zeta_units.push(pack1.unit_inv.clone());
    denominator = denominator.mul(&pack1.poly);
    scalar = scalar.mul(&pack1.scalar);
    let c1 = IwasawaSeries::one(p, n, d).sub(&unit_power_series(
        &rat(c_h as i64, 1),
        1,
        0,
        k0,
        p,
        params,
    )?);
    numerator = numerator.mul(&c1);
    audit.c_factors.push(c1);

    // i = 1..[m/2]: branches at (1+t)^2 (1+p)^{-2i-1} - 1
    for i in 1..=(m / 2) as i64 {
        let gamma = PadicNum::from_i64(1 + p as i64, p, work)
            .pow_i64(2 * i + 1)?
            .invert()?;
        let arg2 = [
            gamma.sub(&PadicNum::one(p, work)),
            gamma.mul(&PadicNum::from_i64(2, p, work)),
            gamma.clone(),
        ];
        let pack2 = zeta_package(p, 2 * k0 - 2 * i - 1, c_h, params, &arg2)?;
        numerator = numerator.mul(&pack2.unit_inv);
        audit.zeta_units.push(pack2.unit_inv.clone());
        if let Some(extra) = &pack2.extra_unit_inv {
            numerator = numerator.mul(extra);
        }
        denominator = denominator.mul(&pack2.poly);
        scalar = scalar.mul(&pack2.scalar);
        let c2 = IwasawaSeries::one(p, n, d).sub(&unit_power_series(
            &rat(c_h as i64, 1),
            2,
            -2 * i,
            k0,
            p,
            params,
        )?);
        numerator = numerator.mul(&c2);
        audit.c_factors.push(c2);
    }

    numerator = numerator.scalar_mul(&scalar);

    let mut family = CoeffFamily {
        h: *h,
        p,
        c_h,
        branch: k0,
        params,
        numerator,
        denominator,
        density: density.clone(),
        audit,
    };

    // verification on held-out weights (beyond the interpolation grid)
    let r_nodes = params.node_count() as i64;
    let step = p as i64 - 1;
    let mut k_min = k0;
    while k_min <= m as i64 + 1 || k_min % 2 != 0 {
        k_min += step;
    }
    for r in [r_nodes, r_nodes + 1, r_nodes + 2] {
        let k = k_min + r * step;
        let via_family = eval_family(&family, k)?;
        let direct = p_regular_coeff(h, k as u32, p, density, n + 2)?;
        let abs = via_family
            .abs_precision()
            .unwrap_or(0)
            .min(direct.abs_precision().unwrap_or(0));
        let ok = via_family.congruent(&direct, abs);
        family.audit.verification.push((k, ok, abs));
        if !ok {
            return Err(Error::Domain(format!(
                "family verification failed at k = {k}: {} vs {}",
                via_family.to_pari_string(),
                direct.to_pari_string()
            )));
        }
    }
    Ok(family)
}

/// Evaluate the family at an admissible weight: S^E(t_k)/P^E(t_k) with
/// t_k = (1+p)^k - 1. Signals a pole when the denominator vanishes.
pub fn eval_family(fam: &CoeffFamily, k: i64) -> Result<PadicNum> {
    let p = fam.p;
    let m = fam.h.genus() as i64;
    if k <= m + 1 || k % 2 != 0 {
        return Err(Error::Domain(format!("need even k > {}", m + 1)));
    }
    if (k - fam.branch).rem_euclid(p as i64 - 1) != 0 {
        return Err(Error::Domain(format!(
            "weight {k} is outside the branch k == {} mod {}",
            fam.branch,
            p - 1
        )));
    }
    let t = t_coordinate(k, p, fam.params.n + 2);
    let den = fam.denominator.evaluate(&t);
    if den.is_zero() {
        let roots = crate::lambda::roots_in_pzp(&fam.denominator, fam.params.n);
        return Err(Error::Pole {
            branch: fam.branch,
            location: roots
                .first()
                .map(|r| r.to_pari_string())
                .unwrap_or_else(|| t.to_pari_string()),
        });
    }
    let num = fam.numerator.evaluate(&t)?;
    num.div(&den)
}
