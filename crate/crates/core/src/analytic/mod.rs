//! Closed-form statistics of the selected end-to-end gain Θ and the exact
//! error rates built from them.

mod config;
mod mgf;
mod product;
mod ser;

pub use config::{Constellation, Modulation, SelectionConfig, SelectionMode};
pub use mgf::{mgf, mgf_receive_selection, MgfTerm, MgfTermSum};
pub use product::{cdf_theta, pdf_theta, product_pdf, product_survival, BesselTerm, BesselTermSum};
pub use ser::{ber_gray_approx, ser_exact, ser_from_mgf, ser_mpsk, ser_mqam};
