use super::quad::{floor_tol, integrate_partitioned, QuadratureSpec};
use crate::error::{domain, Error, Result};
use crate::Real;

/// Modified Bessel function of the second kind, K_order(x), for x > 0.
///
/// Half-integer orders use the terminating closed form. All other orders
/// integrate `∫₀^∞ exp(-x cosh t) cosh(order·t) dt` in log-shifted form, so
/// results near the overflow threshold are reported as [`Error::Range`]
/// rather than as infinity.
pub fn bessel_k<T: Real>(order: T, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("bessel_k requires x > 0, got {x}"));
    }
    if !order.is_finite() {
        return domain("bessel_k order must be finite");
    }
    let nu = order.abs();
    let twice = nu + nu;
    let out = if twice.fract() == T::zero() && twice.to_u64().is_some_and(|n| n % 2 == 1) {
        half_integer(twice.to_u64().unwrap() / 2, x)
    } else {
        integral(nu, x)?
    };
    if !out.is_finite() {
        return Err(Error::Range(format!("K_{nu}({x}) overflows")));
    }
    Ok(out)
}

fn half_integer<T: Real>(n: u64, x: T) -> T {
    let inv_2x = T::one() / (x + x);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..=n {
        let kf = T::from_u64(k).unwrap();
        let nf = T::from_u64(n).unwrap();
        term = term * (nf + kf) * (nf - kf + T::one()) / kf * inv_2x;
        sum = sum + term;
    }
    (T::FRAC_PI_2() / x).sqrt() * (-x).exp() * sum
}

fn integral<T: Real>(nu: T, x: T) -> Result<T> {
    // Exponent of the dominant half of cosh(nu t) exp(-x cosh t).
    let log_kernel = |t: T| nu * t - x * t.cosh();
    let peak_t = (nu / x).asinh();
    let peak = log_kernel(peak_t);
    let margin = -T::epsilon().ln() + T::lit(14.0);

    let mut upper = peak_t + T::one();
    while log_kernel(upper) > peak - margin {
        upper = peak_t + (upper - peak_t) * T::lit(2.0);
    }

    let half = T::lit(0.5);
    let integrand = |t: T| {
        let ch = t.cosh();
        half * ((nu * t - x * ch - peak).exp() + (-nu * t - x * ch - peak).exp())
    };
    let spec = QuadratureSpec::relative(floor_tol(T::lit(1e-13)), 400);
    let mut points = vec![T::zero()];
    if peak_t > T::zero() {
        points.push(peak_t);
    }
    points.push(upper);
    let scaled = integrate_partitioned(integrand, &points, &spec)?;

    let log_value = peak + scaled.ln();
    if log_value > T::max_value().ln() {
        return Err(Error::Range(format!("K_{nu}({x}) exceeds the floating-point range")));
    }
    Ok(log_value.exp())
}
