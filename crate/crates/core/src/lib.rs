//! Exact symbol error rates of orthogonal space-time block codes over a
//! single-antenna amplify-and-forward relay channel with antenna selection,
//! together with antenna-selection capacity analysis and an independent
//! Monte Carlo simulator used to validate every closed form.
//!
//! The analytic layers ([`specfun`], [`terms`], [`analytic`]) are generic
//! over the scalar type through [`Real`]; the aliases at the crate root fix
//! the scalar to `f64`. The simulator ([`montecarlo`]) and the capacity
//! Monte Carlo work in `f64`, and the antenna-count rule in [`capacity`]
//! uses exact rational arithmetic.

// `!(x > 0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod capacity;
mod error;
pub mod montecarlo;
mod scalar;
pub mod specfun;
pub mod stats;
pub mod terms;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analytic::{Constellation, Modulation, SelectionConfig, SelectionMode};

pub type QuadratureSpec = specfun::QuadratureSpec<f64>;
pub type ExpoTerm = terms::ExpoTerm<f64>;
pub type ExpoTermSum = terms::ExpoTermSum<f64>;
pub type BesselTerm = analytic::BesselTerm<f64>;
pub type BesselTermSum = analytic::BesselTermSum<f64>;
pub type MgfTerm = analytic::MgfTerm<f64>;
pub type MgfTermSum = analytic::MgfTermSum<f64>;
