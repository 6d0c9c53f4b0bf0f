//! Exact average SER of M-PSK and square M-QAM through the MGF of Θ.

use std::cell::RefCell;

use super::config::{Constellation, Modulation, SelectionConfig};
use super::mgf::MgfTermSum;
use crate::error::{domain, Error, Result};
use crate::specfun::{integrate_partitioned, QuadratureSpec};
use crate::Real;

/// Integrates `φ(c / sin²θ)` over `[0, upper]` with a breakpoint at π/2.
fn mgf_angle_integral<T: Real>(mgf: &MgfTermSum<T>, c: T, upper: T) -> Result<T> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |theta: T| {
        let s = c / theta.sin().powi(2);
        match mgf.eval(s) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            }
        }
    };
    let mut points = vec![T::zero()];
    if upper > T::FRAC_PI_2() {
        points.push(T::FRAC_PI_2());
    }
    points.push(upper);
    let out = integrate_partitioned(integrand, &points, &QuadratureSpec::default());
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out
}

fn check_snr<T: Real>(mu: T, rate: T) -> Result<()> {
    if mu.is_nan() || mu < T::zero() {
        return domain(format!("average SNR must be non-negative, got {mu}"));
    }
    if !(rate > T::zero()) {
        return domain(format!("code rate must be positive, got {rate}"));
    }
    Ok(())
}

/// SER from a prebuilt MGF; `n_s` is the number of selected receive antennas.
pub fn ser_from_mgf<T: Real>(
    constellation: &Constellation,
    mgf: &MgfTermSum<T>,
    n_s: usize,
    mu: T,
    rate: T,
) -> Result<T> {
    check_snr(mu, rate)?;
    let ceiling = constellation.zero_snr_ser::<T>();
    if mu == T::zero() {
        return Ok(ceiling);
    }
    let c = mu * rate / T::from_count(n_s) * constellation.g_factor::<T>();
    let m = T::from_u32(constellation.order()).unwrap();
    let raw = match constellation.modulation() {
        Modulation::Psk => {
            let upper = T::PI() * (m - T::one()) / m;
            mgf_angle_integral(mgf, c, upper)? / T::PI()
        }
        Modulation::Qam => {
            let q = constellation.q::<T>();
            let four = T::lit(4.0);
            let full = mgf_angle_integral(mgf, c, T::FRAC_PI_2())?;
            let quarter = mgf_angle_integral(mgf, c, T::FRAC_PI_4())?;
            four * q / T::PI() * full - four * q * q / T::PI() * quarter
        }
    };
    Ok(raw.max(T::zero()).min(ceiling))
}

/// Exact M-PSK symbol error rate at average SNR per receive antenna `mu`
/// (linear) for a code of rate `rate`.
pub fn ser_mpsk<T: Real>(constellation: &Constellation, cfg: &SelectionConfig, mu: T, rate: T) -> Result<T> {
    if constellation.modulation() != Modulation::Psk {
        return domain("ser_mpsk needs a PSK constellation");
    }
    ser_from_mgf(constellation, &MgfTermSum::for_config(cfg), cfg.n_s(), mu, rate)
}

/// Exact square M-QAM symbol error rate.
pub fn ser_mqam<T: Real>(constellation: &Constellation, cfg: &SelectionConfig, mu: T, rate: T) -> Result<T> {
    if constellation.modulation() != Modulation::Qam {
        return domain("ser_mqam needs a square QAM constellation");
    }
    ser_from_mgf(constellation, &MgfTermSum::for_config(cfg), cfg.n_s(), mu, rate)
}

/// Dispatches on the constellation family.
pub fn ser_exact<T: Real>(constellation: &Constellation, cfg: &SelectionConfig, mu: T, rate: T) -> Result<T> {
    ser_from_mgf(constellation, &MgfTermSum::for_config(cfg), cfg.n_s(), mu, rate)
}

/// Gray-labelling approximation BER ≈ SER / log2 M. Exact BER is only
/// available from simulation.
pub fn ber_gray_approx<T: Real>(ser: T, constellation: &Constellation) -> Result<T> {
    if ser.is_nan() || ser < T::zero() || ser > T::one() {
        return domain(format!("SER must lie in [0, 1], got {ser}"));
    }
    Ok(ser / T::from_u32(constellation.bits_per_symbol()).unwrap())
}
