//! Special functions and finite-interval quadrature.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
pub(crate) mod gamma;
mod hyperu;
mod quad;

pub use bessel::bessel_k;
pub use gamma::{harmonic, harmonic_exact, ln_gamma};
pub use hyperu::{hyp_u, hyp_u_scaled};
pub use quad::{gauss_legendre_nodes, integrate_finite, integrate_partitioned, QuadratureSpec, PANEL_ORDER};
