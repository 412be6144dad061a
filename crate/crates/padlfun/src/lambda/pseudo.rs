//! Pseudomeasures: per-branch fractions p^mu * S(t) / P(t) over the
//! Iwasawa algebra, evaluated through their Mellin transform, and the
//! induced family of distributions on (Z/p)^* cells.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::newton::roots_in_pzp;
use super::prepare::DistinguishedPoly;
use super::series::IwasawaSeries;
use crate::padic::{teichmuller, PadicNum};
use crate::{Error, Result};

/// One branch: the function p^mu * numerator / denominator.
#[derive(Debug, Clone)]
pub struct PseudoBranch {
    pub mu: u32,
    pub numerator: IwasawaSeries,
    pub denominator: DistinguishedPoly,
}

/// Element of the fraction field of the Iwasawa algebra, stored per tame
/// branch j mod (p-1). Absent branches are omitted by the primed sums
/// (identically-pole or unrepresented reciprocals).
#[derive(Debug, Clone)]
pub struct Pseudomeasure {
    p: u64,
    branches: BTreeMap<u32, PseudoBranch>,
}

impl Pseudomeasure {
    pub fn new(p: u64) -> Pseudomeasure {
        Pseudomeasure {
            p,
            branches: BTreeMap::new(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn set_branch(&mut self, j: i64, branch: PseudoBranch) {
        let j = j.rem_euclid(self.p as i64 - 1) as u32;
        self.branches.insert(j, branch);
    }

    /// An honest measure (denominator 1) on the given branch.
    pub fn set_measure_branch(&mut self, j: i64, numerator: IwasawaSeries) {
        let one = DistinguishedPoly::one(self.p, numerator.n_prec());
        self.set_branch(
            j,
            PseudoBranch {
                mu: 0,
                numerator,
                denominator: one,
            },
        );
    }

    pub fn branch(&self, j: i64) -> Option<&PseudoBranch> {
        self.branches.get(&(j.rem_euclid(self.p as i64 - 1) as u32))
    }

    pub fn branches(&self) -> impl Iterator<Item = (&u32, &PseudoBranch)> {
        self.branches.iter()
    }
}

/// Evaluate branch j of the pseudomeasure at t0 in pZ_p. Returns the value
/// p^mu * S(t0)/P(t0) (negative valuation allowed). Vanishing denominators
/// raise a pole signal carrying the nearest-root location estimate.
pub fn mellin_eval(rho: &Pseudomeasure, j: i64, t0: &PadicNum) -> Result<PadicNum> {
    let p = rho.prime();
    let branch = rho.branch(j).ok_or_else(|| Error::Pole {
        branch: j,
        location: "branch omitted (identically singular)".into(),
    })?;
    let den = branch.denominator.evaluate(t0);
    if den.is_zero() {
        // locate the offending root for the signal
        let roots = roots_in_pzp(&branch.denominator, branch.denominator.n_prec());
        let nearest = roots
            .iter()
            .map(|r| r.to_pari_string())
            .next()
            .unwrap_or_else(|| "t0".into());
        return Err(Error::Pole {
            branch: j,
            location: nearest,
        });
    }
    let num = branch.numerator.evaluate(t0)?;
    let mut val = num.div(&den)?;
    if branch.mu > 0 {
        val = val.mul(&PadicNum::from_i64(
            (p as i64).pow(branch.mu),
            p,
            val.digits().unwrap_or(1) + branch.mu,
        ));
    }
    Ok(val)
}

/// The distribution rho_x attached to the pseudomeasure at the character
/// point (tame branch j_x, wild coordinate t0), at tame level v = 1:
///
///   rho_x(a + (p)) = 1/phi(p) * sum'_chi chi(a)^{-1} S(chi x)/P(chi x)
///
/// with the primed sum over tame characters chi, omitting terms whose
/// denominator vanishes (or whose branch is absent). Returns the map from
/// unit residues a mod p to values.
pub fn distribution_values(
    rho: &Pseudomeasure,
    j_x: i64,
    t0: &PadicNum,
    v: u32,
) -> Result<BTreeMap<u64, PadicNum>> {
    if v != 1 {
        return Err(Error::Domain("only tame level v = 1 is supported".into()));
    }
    let p = rho.prime();
    let digits = rho
        .branches()
        .map(|(_, b)| b.numerator.n_prec())
        .max()
        .unwrap_or(1);
    // branch values S(chi x)/P(chi x) for chi = omega^i
    let mut branch_values: Vec<Option<PadicNum>> = Vec::with_capacity(p as usize - 1);
    for i in 0..(p - 1) as i64 {
        match mellin_eval(rho, i + j_x, t0) {
            Ok(v) => branch_values.push(Some(v)),
            Err(Error::Pole { .. }) => branch_values.push(None),
            Err(e) => return Err(e),
        }
    }
    let inv_phi = PadicNum::from_i64(p as i64 - 1, p, digits).invert()?;
    let mut out = BTreeMap::new();
    for a in 1..p {
        let omega_a = teichmuller(&BigInt::from(a), p, digits);
        let omega_a_inv = omega_a.invert()?;
        let mut acc = PadicNum::exact_zero(p);
        for (i, bv) in branch_values.iter().enumerate() {
            let Some(bv) = bv else { continue };
            // chi(a)^{-1} = omega(a)^{-i}
            let ch = omega_a_inv.pow_i64(i as i64)?;
            acc = acc.add(&ch.mul(bv));
        }
        out.insert(a, acc.mul(&inv_phi));
    }
    Ok(out)
}
