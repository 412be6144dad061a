//! Quadratic characters attached to discriminants, with the canonical
//! fundamental-discriminant decomposition D = D0 * f^2.

use serde::{Deserialize, Serialize};

use super::{factorize_u64, kronecker};
use crate::{Error, Result};

/// Quadratic character of discriminant D, stored with its fundamental part
/// D0, square part f (D = D0 f^2) and conductor C = |D0|. The character
/// value at n is the Kronecker symbol (D0/n).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadChar {
    d: i64,
    d0: i64,
    f: u64,
    conductor: u64,
}

impl QuadChar {
    /// Canonicalize a discriminant. Fails unless D is congruent to 0 or 1
    /// mod 4 (the only integers of the form D0 * f^2).
    pub fn from_discriminant(d: i64) -> Result<QuadChar> {
        if d == 0 {
            return Err(Error::Domain("discriminant must be nonzero".into()));
        }
        let r = d.rem_euclid(4);
        if r == 2 || r == 3 {
            return Err(Error::Domain(format!(
                "{d} is not a discriminant (== 2, 3 mod 4)"
            )));
        }
        // squarefree kernel of |d|
        let fact = factorize_u64(d.unsigned_abs());
        let mut kernel = 1i64;
        let mut square_root = 1u64;
        for (p, e) in fact.factors() {
            let p: u64 = p.try_into().expect("factor of u64 fits");
            if e % 2 == 1 {
                kernel *= p as i64;
            }
            for _ in 0..e / 2 {
                square_root *= p;
            }
        }
        let signed_kernel = if d < 0 { -kernel } else { kernel };
        let (d0, f) = if signed_kernel.rem_euclid(4) == 1 {
            (signed_kernel, square_root)
        } else {
            debug_assert_eq!(
                square_root % 2,
                0,
                "D == 0,1 mod 4 forces an even square part here"
            );
            (4 * signed_kernel, square_root / 2)
        };
        Ok(QuadChar {
            d,
            d0,
            f,
            conductor: d0.unsigned_abs(),
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn fundamental(&self) -> i64 {
        self.d0
    }

    /// Square part f with D = D0 * f^2.
    pub fn square_part(&self) -> u64 {
        self.f
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// True for the trivial character (D0 = 1).
    pub fn is_trivial(&self) -> bool {
        self.d0 == 1
    }

    /// chi(-1): +1 for even characters, -1 for odd.
    pub fn parity(&self) -> i32 {
        if self.d0 > 0 {
            1
        } else {
            -1
        }
    }

    /// Character value at n: the Kronecker symbol (D0/n), zero on integers
    /// sharing a factor with the conductor.
    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.d0, n)
    }
}
