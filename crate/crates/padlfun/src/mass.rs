//! Minkowski-Siegel mass constants: exact rational values via the
//! Bernoulli product, denominator factor tables matching the gp listings,
//! Newton-polygon valuation predictions for the p-regular part, lattice
//! theta series by short-vector enumeration, and the rank-8 identity
//! Theta_{E8} = E_4 with 1/m_4 = |Aut(E8)|.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli, factorize, ord_p_int, ord_p_rat, rat, zeta_neg, Factorization, Rat};
use crate::eisenstein::{elliptic_eisenstein, HalfIntMatrix, QExpansion};
use crate::lambda::valuation_at_tj;
use crate::measures::{iwasawa_series, SeriesMethod, SeriesParams};
use crate::{Error, Result};

/// One row of the mass table: the gp-style label n (weight), the mass
/// m_n, its reciprocal, and the factored denominator of 1/m_n.
#[derive(Debug, Clone)]
pub struct MassRow {
    pub label: u32,
    pub mass: Rat,
    pub reciprocal: Rat,
    pub denominator_factors: Factorization,
}

/// Exact mass constant m_k = 2^{-k} zeta(1-k) prod_{i=1}^{k-1} zeta(1-2k+2i)
/// = (-1)^k B_k/(2k) prod_{j=1}^{k-1} B_{2j}/(4j). Both closed forms are
/// computed and asserted equal.
pub fn mass_constant(k: u32) -> Rat {
    assert!(k >= 1);
    // zeta-product form
    let mut via_zeta = zeta_neg(k) * Rat::new(BigInt::one(), BigInt::from(2).pow(k));
    for i in 1..k {
        via_zeta *= zeta_neg(2 * k - 2 * i);
    }
    // Bernoulli-product form; at k = 1 the B_1 = -1/2 convention flips
    // the sign of the identity, so the cross-check starts at k = 2
    if k >= 2 {
        let mut via_bern = bernoulli(k) / rat(2 * k as i64, 1);
        if k % 2 == 1 {
            via_bern = -via_bern;
        }
        for j in 1..k {
            via_bern *= bernoulli(2 * j) / rat(4 * j as i64, 1);
        }
        assert_eq!(via_zeta, via_bern, "the two closed forms must agree");
    }
    via_zeta
}

/// Mass table rows for even labels 2, 4, ..., max_label, with the
/// denominator of each reciprocal factored (gp: factor(denominator(1/mass(n)))).
pub fn mass_table(max_label: u32, with_factorization: bool) -> Result<Vec<MassRow>> {
    let mut rows = Vec::new();
    for label in (2..=max_label).step_by(2) {
        let mass = mass_constant(label);
        let reciprocal = mass.recip();
        let denominator_factors = if with_factorization {
            factorize(
                &reciprocal
                    .denom()
                    .to_biguint()
                    .expect("positive denominator"),
            )?
        } else {
            factorize(&BigUint::one())?
        };
        rows.push(MassRow {
            label,
            mass,
            reciprocal,
            denominator_factors,
        });
    }
    Ok(rows)
}

/// Newton-polygon prediction vs exact computation of the denominator
/// contribution of p to the p-regular part of 1/m_k.
///
/// The p-regular reciprocal is the product of the interpolated values
/// U*(t_{j-1})(1-c^j)/P_theta_j(t_{j-1}) over j = k and j = 2,...,2k-2.
/// The trivial (von Staudt) poles of the constituents cancel against the
/// ord of the regularizing factor 1-c^j, so the p-power that survives in
/// the DENOMINATOR of 1/m_k is carried entirely by the distinguished
/// polynomials: per constituent, max(0, ord_p P(t_{j-1}) - ord_p(1-c^j)).
/// The exact route counts the constituents whose regularized zeta value
/// has p in the numerator. Regular primes give (0, 0); an irregular
/// branch zero shows up on both sides.
#[derive(Debug, Clone, Copy)]
pub struct MassValuation {
    pub predicted: i64,
    pub actual: i64,
    pub matched: bool,
}

pub fn p_regular_mass_valuation(k: u32, p: u64, params: SeriesParams) -> Result<MassValuation> {
    assert!(k >= 2 && k % 2 == 0, "even k >= 2");
    let c = crate::measures::default_c(p, &[]);
    let mut exponents: Vec<u32> = (1..k).map(|i| 2 * k - 2 * i).collect();
    exponents.push(k);
    // predicted: per constituent, -max(0, ord P(t_{j-1}) + mu - ord(1-c^j))
    let mut predicted = 0i64;
    for &j in &exponents {
        let branch = iwasawa_series(p, j as i64 - 1, c, params, SeriesMethod::Interpolation)?;
        let prepared = branch
            .prepared
            .as_ref()
            .ok_or_else(|| Error::Domain("vanishing zeta branch".into()))?;
        let cj = BigInt::from(c).pow(j) - BigInt::one();
        let ord_cfactor = ord_p_int(&cj, p).unwrap_or(0) as i64;
        let ord_poly = valuation_at_tj(&prepared.poly, j as u64 - 1)? + prepared.mu as i64;
        predicted -= (ord_poly - ord_cfactor).max(0);
    }
    // actual: constituents with p in the numerator of the regularized value
    let mut actual = 0i64;
    for &j in &exponents {
        let pk = Rat::from(BigInt::from(p).pow(j - 1));
        let reg = zeta_neg(j) * (Rat::one() - pk);
        actual -= ord_p_rat(&reg, p).expect("nonzero zeta value").max(0);
    }
    Ok(MassValuation {
        predicted,
        actual,
        matched: predicted == actual,
    })
}

/// Even integral lattice given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Lattice> {
        let rank = gram.len();
        if rank == 0 || gram.iter().any(|r| r.len() != rank) {
            return Err(Error::Domain("Gram matrix must be square".into()));
        }
        for i in 0..rank {
            if gram[i][i] % 2 != 0 {
                return Err(Error::Domain("even lattice needs even diagonal".into()));
            }
            for j in 0..rank {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Domain("Gram matrix must be symmetric".into()));
                }
            }
        }
        let lattice = Lattice { rank, gram };
        if lattice.cholesky().is_none() {
            return Err(Error::Domain(
                "Gram matrix must be positive definite".into(),
            ));
        }
        Ok(lattice)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Rational Cholesky-style decomposition; `None` unless positive
    /// definite. Returns q[i][j] with the quadratic form written as
    /// sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2.
    fn cholesky(&self) -> Option<Vec<Vec<Rat>>> {
        let n = self.rank;
        let mut a: Vec<Vec<Rat>> = self
            .gram
            .iter()
            .map(|row| row.iter().map(|&v| rat(v, 1)).collect())
            .collect();
        let mut q = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            if !a[i][i].is_positive() {
                return None;
            }
            q[i][i] = a[i][i].clone();
            for j in i + 1..n {
                q[i][j] = &a[i][j] / &a[i][i];
            }
            // Schur complement on the trailing block (kept symmetric)
            for l in i + 1..n {
                for m in i + 1..n {
                    let sub = &a[i][l] * &a[i][m] / &a[i][i];
                    a[l][m] -= sub;
                }
            }
        }
        Some(q)
    }

    /// JSON object {rank, gram}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Lattice> {
        let l: Lattice = serde_json::from_value(v.clone())
            .map_err(|e| Error::Domain(format!("bad lattice JSON: {e}")))?;
        Lattice::new(l.gram)
    }
}

/// The standard even realization of the E8 root lattice.
pub fn e8_lattice() -> Lattice {
    Lattice::new(vec![
        vec![2, -1, 0, 0, 0, 0, 0, 0],
        vec![-1, 2, -1, 0, 0, 0, 0, 0],
        vec![0, -1, 2, -1, 0, 0, 0, 0],
        vec![0, 0, -1, 2, -1, 0, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0, -1],
        vec![0, 0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, 0, -1, 2, 0],
        vec![0, 0, 0, 0, -1, 0, 0, 2],
    ])
    .expect("E8 Gram is even positive definite")
}

/// Theta series of an even lattice: coefficient of q^n counts vectors of
/// norm 2n. The search tree is pruned by the exact rational Cholesky data
/// lowered to f64 with a conservative slack; every surviving leaf is
/// certified by the exact integer norm x^T G x.
pub fn theta_series(lattice: &Lattice, cutoff: u64) -> Result<QExpansion> {
    let q = lattice
        .cholesky()
        .ok_or_else(|| Error::Domain("not positive definite".into()))?;
    let n = lattice.rank();
    let qf: Vec<Vec<f64>> = q
        .iter()
        .map(|row| row.iter().map(rat_to_f64).collect())
        .collect();
    // norms are integers, so half a unit of slack absorbs the roundoff
    let bound = 2.0 * cutoff as f64 + 0.5;
    let mut counts = vec![0u64; cutoff as usize + 1];

    struct Ctx<'a> {
        qf: &'a [Vec<f64>],
        gram: &'a [Vec<i64>],
        bound: f64,
        counts: &'a mut [u64],
        cutoff: u64,
    }

    // DFS over coordinates from the last: x_i ranges with
    // q_ii (x_i + sum_{j>i} q_ij x_j)^2 <= remaining budget
    fn dfs(ctx: &mut Ctx, i: usize, x: &mut [i64], used: f64) {
        let n = ctx.qf.len();
        let mut center = 0.0;
        for j in i + 1..n {
            center += ctx.qf[i][j] * x[j] as f64;
        }
        let budget = ctx.bound - used;
        let half_width = (budget / ctx.qf[i][i]).max(0.0).sqrt() + 1.0;
        let lo = (-center - half_width).floor() as i64;
        let hi = (-center + half_width).ceil() as i64;
        for xi in lo..=hi {
            let t = xi as f64 + center;
            let contrib = ctx.qf[i][i] * t * t;
            if contrib > budget {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                // certify with the exact integer norm
                let mut norm = 0i64;
                for a in 0..n {
                    for b in 0..n {
                        norm += x[a] * ctx.gram[a][b] * x[b];
                    }
                }
                debug_assert!(norm >= 0 && norm % 2 == 0, "even lattice");
                let half = (norm / 2) as u64;
                if half >= 1 && half <= ctx.cutoff {
                    ctx.counts[half as usize] += 1;
                }
            } else {
                dfs(ctx, i - 1, x, used + contrib);
            }
        }
        x[i] = 0;
    }

    let mut x = vec![0i64; n];
    let mut ctx = Ctx {
        qf: &qf,
        gram: lattice.gram(),
        bound,
        counts: &mut counts,
        cutoff,
    };
    dfs(&mut ctx, n - 1, &mut x, 0.0);

    let mut theta = QExpansion::new(1, cutoff, Rat::one());
    for (half, count) in counts.iter().enumerate().skip(1) {
        theta.set(
            HalfIntMatrix::Genus1 { h: half as u64 },
            rat(*count as i64, 1),
        )?;
    }
    Ok(theta)
}

fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(1.0);
        n / d
    })
}

/// Report of the rank-8 mass identity check.
#[derive(Debug, Clone)]
pub struct MassIdentityReport {
    pub coefficients_match: bool,
    pub automorphism_count_matches: bool,
    pub checked_up_to: u64,
}

/// Verify Theta_{E8} = E_4 coefficient-by-coefficient up to the cutoff
/// and 1/m_4 = |Aut(E8)| = 696729600 (single-class genus, h = 1).
pub fn mass_identity_rank8(cutoff: u64) -> Result<MassIdentityReport> {
    let theta = theta_series(&e8_lattice(), cutoff)?;
    let e4 = elliptic_eisenstein(4, cutoff)?;
    let coefficients_match = (0..=cutoff).all(|n| theta.coeff_n(n) == e4.coeff_n(n));
    let automorphism_count_matches = mass_constant(4) * rat(696729600, 1) == Rat::one();
    Ok(MassIdentityReport {
        coefficients_match,
        automorphism_count_matches,
        checked_up_to: cutoff,
    })
}
