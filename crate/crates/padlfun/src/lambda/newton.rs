//! Newton polygons of distinguished polynomials, the valuation of P(t_j)
//! by the min formula, and digit-by-digit isolation of roots in pZ_p.

use num_bigint::BigUint;
use num_traits::Zero;

use super::prepare::DistinguishedPoly;
use crate::arith::{rat, Rat};
use crate::padic::{t_coordinate, PadicNum};
use crate::{Error, Result};

/// One segment of the Newton polygon, in the root-valuation convention:
/// `multiplicity` roots of valuation `root_valuation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonSegment {
    pub root_valuation: Rat,
    pub multiplicity: usize,
}

/// Lower convex hull of {(i, ord_p a_i)}, reported as root valuations in
/// increasing order. The empty polygon for constant polynomials.
pub fn newton_polygon(poly: &DistinguishedPoly) -> Vec<NewtonSegment> {
    let deg = poly.degree();
    if deg == 0 {
        return vec![];
    }
    let mut points: Vec<(i64, i64)> = Vec::new();
    for i in 0..=deg {
        if let Some(o) = poly.coeff_ord(i) {
            points.push((i as i64, o as i64));
        }
    }
    // monotone-chain lower hull (points already sorted by abscissa)
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it is strictly below the chord a->pt
            if (b.1 - a.1) * (pt.0 - a.0) <= (pt.1 - a.1) * (b.0 - a.0) {
                break;
            }
            hull.pop();
        }
        hull.push(pt);
    }
    let mut segments: Vec<NewtonSegment> = hull
        .windows(2)
        .map(|w| NewtonSegment {
            root_valuation: rat(w[0].1 - w[1].1, w[1].0 - w[0].0),
            multiplicity: (w[1].0 - w[0].0) as usize,
        })
        .collect();
    segments.sort_by(|a, b| a.root_valuation.cmp(&b.root_valuation));
    segments
}

/// ord_p P(t_j) with t_j = (1+p)^j - 1, by the Newton min formula
/// min_i (ord a_i + i (ord_p j + 1)). Falls back to direct evaluation when
/// the minimum is not attained uniquely; errors only if that evaluation is
/// also precision-exhausted.
pub fn valuation_at_tj(poly: &DistinguishedPoly, j: u64) -> Result<i64> {
    assert!(j >= 1, "valuation_at_tj requires j >= 1");
    let p = poly.prime();
    let vt = crate::arith::ord_p_int(&num_bigint::BigInt::from(j), p).unwrap() as i64 + 1;
    let mut best: Option<i64> = None;
    let mut unique = true;
    for i in 0..=poly.degree() {
        let Some(o) = poly.coeff_ord(i) else { continue };
        let cand = o as i64 + i as i64 * vt;
        match best {
            None => best = Some(cand),
            Some(b) if cand < b => {
                best = Some(cand);
                unique = true;
            }
            Some(b) if cand == b => unique = false,
            _ => {}
        }
    }
    let best = best.ok_or_else(|| {
        Error::PrecisionExhausted("polynomial is zero to working precision".into())
    })?;
    if unique {
        return Ok(best);
    }
    // ambiguous minimum: evaluate directly
    let t = t_coordinate(j as i64, p, poly.n_prec());
    let value = poly.evaluate(&t);
    value.valuation().ok_or_else(|| {
        Error::PrecisionExhausted(format!(
            "ord P(t_{j}): min formula ambiguous and P(t_{j}) = 0 to working precision"
        ))
    })
}

fn eval_mod(coeffs: &[BigUint], x: &BigUint, m: &BigUint) -> BigUint {
    let mut acc = BigUint::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c) % m;
    }
    acc
}

/// Depth-first search for one root in pZ_p, lifting one digit at a time.
/// A prefix survives level v when P(prefix) == 0 mod p^{v+1}.
fn find_first_root(coeffs: &[BigUint], p: u64, n: u32) -> Option<BigUint> {
    struct Dfs<'a> {
        coeffs: &'a [BigUint],
        p: u64,
        n: u32,
    }
    impl Dfs<'_> {
        fn go(&self, prefix: BigUint, v: u32) -> Option<BigUint> {
            if v >= self.n {
                return Some(prefix);
            }
            let next_mod = BigUint::from(self.p).pow(v + 1);
            let step = BigUint::from(self.p).pow(v);
            for d in 0..self.p {
                let cand = &prefix + &step * BigUint::from(d);
                if eval_mod(self.coeffs, &cand, &next_mod).is_zero() {
                    if let Some(r) = self.go(cand, v + 1) {
                        return Some(r);
                    }
                }
            }
            None
        }
    }
    let dfs = Dfs { coeffs, p, n };
    // roots in pZ_p have first digit 0
    let m1 = BigUint::from(p);
    if eval_mod(coeffs, &BigUint::zero(), &m1).is_zero() {
        dfs.go(BigUint::zero(), 1)
    } else {
        None
    }
}

/// Synthetic division of a monic-in-storage polynomial by (t - r) mod p^n.
/// Returns (quotient, remainder).
fn divide_linear(coeffs: &[BigUint], r: &BigUint, p: u64, n: u32) -> (Vec<BigUint>, BigUint) {
    let m = BigUint::from(p).pow(n);
    let mut quo = vec![BigUint::zero(); coeffs.len() - 1];
    let mut carry = BigUint::zero();
    for i in (0..coeffs.len()).rev() {
        let cur = (&coeffs[i] + &carry) % &m;
        if i == 0 {
            return (quo, cur);
        }
        quo[i - 1] = cur.clone();
        carry = cur * r % &m;
    }
    unreachable!()
}

/// All roots of a distinguished polynomial in pZ_p, with multiplicity,
/// found by digit-by-digit backtracking and factor peeling. Roots are
/// reported modulo the search precision; clustered (multiple) roots are
/// accurate to the cluster radius.
pub fn roots_in_pzp(poly: &DistinguishedPoly, digits: u32) -> Vec<PadicNum> {
    let p = poly.prime();
    let n = digits.min(poly.n_prec());
    let mut work: Vec<BigUint> = poly
        .raw_coeffs()
        .iter()
        .map(|c| c % BigUint::from(p).pow(n))
        .collect();
    let mut out = Vec::new();
    while work.len() > 1 {
        let Some(r) = find_first_root(&work, p, n) else {
            break;
        };
        let (quo, _rem) = divide_linear(&work, &r, p, n);
        if r.is_zero() {
            out.push(PadicNum::approx_zero(p, n as i64));
        } else {
            out.push(
                PadicNum::from_bigint(&num_bigint::BigInt::from(r), p, n).reduce_abs(n as i64),
            );
        }
        work = quo;
    }
    out
}
