//! Linearizations of rational matrices.

pub mod error;
pub mod exactalg;
pub mod smithmcmillan;
pub mod sysmat;
pub mod blockfullrank;
pub mod aaa;
pub mod cork;
pub mod eigsolve;
mod numeric;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/poles-and-zeros.md")]
    mod poles_and_zeros {}
    #[doc = include_str!("../../../book/src/linearizations.md")]
    mod linearizations {}
    #[doc = include_str!("../../../book/src/rational-approximation.md")]
    mod rational_approximation {}
    #[doc = include_str!("../../../book/src/cork.md")]
    mod cork {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
