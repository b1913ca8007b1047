//! Exact polynomial, rational-function and matrix arithmetic over ℚ and
//! ℚ(i), with floating-point mirrors.

pub mod linalg;
mod matrix;
mod poly;
mod ratfun;
pub mod roots;
mod scalar;
pub mod serial;

pub use matrix::{Mat, PolyMatrix, RatMatrix, Ring};
pub use poly::{Degree, Poly};
pub use ratfun::RatFun;
pub use scalar::{
    format_rational, int, parse_rational, rational_to_f64, ExactField, GaussRational, Rational, Scalar,
};
#[cfg(test)]
pub(crate) use scalar::rat;
