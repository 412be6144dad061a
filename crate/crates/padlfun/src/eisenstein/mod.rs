//! Siegel-Eisenstein Fourier coefficients for genus m = 1, 2: exact
//! normalized and raw coefficients, p-regular parts, the interpolating
//! coefficient families (numerator series over distinguished polynomial),
//! formal q-expansions with their operators, and the genus-1 geometric
//! verification routines (singular series, twist averages, character
//! orthogonality).

mod coeffs;
mod family;
mod geometry;
mod qexp;

pub use coeffs::{
    cminus, cplus, normalized_coeff, p_regular_coeff, psi_and_conductor, raw_coeff, HalfIntMatrix,
    LocalDensity,
};
pub use family::{build_family, eval_family, CoeffFamily, FamilyAudit};
pub use geometry::{
    character_orthogonality, singular_series_m1, twist_average_check, OrthogonalityReport,
    SingularSeriesResult, TwistReport,
};
pub use qexp::{elliptic_eisenstein, remove_p_singular, QExpansion};
