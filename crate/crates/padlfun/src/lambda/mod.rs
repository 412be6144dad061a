//! The Iwasawa algebra Z_p[[t]] with tracked p-adic and t-adic precision:
//! truncated series arithmetic, Weierstrass preparation, distinguished
//! polynomials, Newton polygons, root isolation in pZ_p, and pseudomeasures
//! (fractions over the algebra) with Mellin evaluation.

mod newton;
mod prepare;
mod pseudo;
mod series;

pub use newton::{newton_polygon, roots_in_pzp, valuation_at_tj, NewtonSegment};
pub use prepare::{weierstrass_prepare, DistinguishedPoly, Prepared};
pub use pseudo::{distribution_values, mellin_eval, PseudoBranch, Pseudomeasure};
pub use series::{compose_poly, IwasawaSeries};
