//! Finite formal Fourier expansions indexed by half-integral matrices,
//! with exact rational coefficients: construction of the elliptic
//! Eisenstein series and the p-singular removal operator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{divisor_power_sum, rat, zeta_neg, Rat};
use crate::{Error, Result};

use super::coeffs::HalfIntMatrix;

/// Finitely supported q-expansion with exact rational coefficients and a
/// trace truncation bound. Every index with trace within the bound is
/// present (possibly zero), so omissions are never silent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    genus: u32,
    cutoff: u64,
    constant: Rat,
    coeffs: BTreeMap<HalfIntMatrix, Rat>,
}

impl QExpansion {
    pub fn new(genus: u32, cutoff: u64, constant: Rat) -> QExpansion {
        QExpansion {
            genus,
            cutoff,
            constant,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn set(&mut self, h: HalfIntMatrix, value: Rat) -> Result<()> {
        if h.genus() != self.genus {
            return Err(Error::Domain("genus mismatch".into()));
        }
        if h.trace() > self.cutoff {
            return Err(Error::Domain("index beyond the trace cutoff".into()));
        }
        self.coeffs.insert(h, value);
        Ok(())
    }

    pub fn coeff(&self, h: &HalfIntMatrix) -> Rat {
        self.coeffs.get(h).cloned().unwrap_or_default()
    }

    /// Genus-1 coefficient by integer index (0 gives the constant term).
    pub fn coeff_n(&self, n: u64) -> Rat {
        if n == 0 {
            return self.constant.clone();
        }
        self.coeff(&HalfIntMatrix::Genus1 { h: n })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HalfIntMatrix, &Rat)> {
        self.coeffs.iter()
    }

    pub fn scalar_mul(&self, s: &Rat) -> QExpansion {
        QExpansion {
            genus: self.genus,
            cutoff: self.cutoff,
            constant: &self.constant * s,
            coeffs: self.coeffs.iter().map(|(h, v)| (*h, v * s)).collect(),
        }
    }

    /// JSON object {m, cutoff, entries: [[[index...], "num/den"], ...]},
    /// with [0] / [0,0,0] carrying the constant term.
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = Vec::new();
        let zero_index = if self.genus == 1 {
            vec![0i64]
        } else {
            vec![0, 0, 0]
        };
        entries.push(serde_json::json!([
            zero_index,
            format!("{}/{}", self.constant.numer(), self.constant.denom())
        ]));
        for (h, v) in &self.coeffs {
            let idx = match h {
                HalfIntMatrix::Genus1 { h } => vec![*h as i64],
                HalfIntMatrix::Genus2 { a, b, c } => vec![*a, *b, *c],
            };
            entries.push(serde_json::json!([
                idx,
                format!("{}/{}", v.numer(), v.denom())
            ]));
        }
        serde_json::json!({
            "m": self.genus,
            "cutoff": self.cutoff,
            "entries": entries,
        })
    }
}

/// The classical elliptic Eisenstein series of even weight k >= 4 with
/// constant term 1: coefficients (2/zeta(1-k)) sigma_{k-1}(n).
pub fn elliptic_eisenstein(k: u32, cutoff: u64) -> Result<QExpansion> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::Domain("weight must be even and >= 4".into()));
    }
    let scale = rat(2, 1) / zeta_neg(k);
    let mut f = QExpansion::new(1, cutoff, Rat::one());
    for n in 1..=cutoff {
        let sigma = Rat::from(BigInt::from(divisor_power_sum(k - 1, n, None)));
        f.set(HalfIntMatrix::Genus1 { h: n }, &scale * sigma)?;
    }
    Ok(f)
}

/// Zero out the coefficients at indices with p | det(2h) (genus 1: p | n),
/// leaving everything else unchanged.
pub fn remove_p_singular(f: &QExpansion, p: u64) -> QExpansion {
    let mut out = f.clone();
    for (h, v) in out.coeffs.iter_mut() {
        if h.det2() % p == 0 {
            *v = Rat::default();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn eisenstein_expansions() {
        let e4 = elliptic_eisenstein(4, 8).unwrap();
        assert_eq!(e4.constant(), &Rat::one());
        let expect = [240i64, 2160, 6720, 17520, 30240, 60480, 82560, 140400];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(e4.coeff_n(n as u64 + 1), rat(*e, 1), "n={}", n + 1);
        }
        // weight 12: denominators divide 691
        let e12 = elliptic_eisenstein(12, 10).unwrap();
        for n in 1..=10 {
            assert!(
                (BigInt::from(691) % e12.coeff_n(n).denom()).is_zero(),
                "n={n}"
            );
        }
        assert!(elliptic_eisenstein(3, 5).is_err());
    }

    #[test]
    fn p_singular_removal() {
        let e4 = elliptic_eisenstein(4, 10).unwrap();
        let r = remove_p_singular(&e4, 5);
        for n in 1..=10u64 {
            if n % 5 == 0 {
                assert!(r.coeff_n(n).is_zero(), "n={n}");
            } else {
                assert_eq!(r.coeff_n(n), e4.coeff_n(n), "n={n}");
            }
        }
        // idempotent
        assert_eq!(remove_p_singular(&r, 5), r);
        // commutes with scalar multiplication
        let s = rat(3, 7);
        assert_eq!(remove_p_singular(&e4.scalar_mul(&s), 5), r.scalar_mul(&s));
    }

    #[test]
    fn json_shape() {
        let e4 = elliptic_eisenstein(4, 2).unwrap();
        let j = e4.to_json();
        assert_eq!(j["m"], 1);
        assert_eq!(j["cutoff"], 2);
        assert_eq!(j["entries"][0][0][0], 0);
        assert_eq!(j["entries"][1][1], "240/1");
    }
}
