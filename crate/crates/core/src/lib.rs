//! Low-autocorrelation binary sequences searched with a genetic algorithm and
//! socio-cognitive mutation operators.

pub mod bench;
pub mod engine;
pub mod error;
pub mod labs;
pub mod operators;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/ga.md")]
    mod ga {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
