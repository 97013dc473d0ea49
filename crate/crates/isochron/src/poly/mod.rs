//! Exact and floating polynomial algebra.

pub mod bivar;
pub mod resultant;
pub mod ring;
pub mod roots;
pub mod univar;

pub use bivar::{BivarPoly, BivarPolyH, Var};
pub use resultant::{
    degree_drop_at, degree_drop_at_float, discriminant_at, discriminant_in_y_exact, discriminant_in_y_float,
    resultant_at, resultant_in_y_exact, resultant_in_y_float, UniPolyOverH, ZERO_THRESHOLD,
};
pub use ring::{parse_rational, GaussInt, GaussianRational, Ring};
pub use roots::univariate_roots;
pub use univar::UniPoly;
