use super::gamma::ln_gamma_unchecked;
use super::quad::{floor_tol, integrate_partitioned, QuadratureSpec};
use crate::error::{domain, Result};
use crate::Real;

/// Beyond this argument the three-term asymptotic series replaces quadrature.
const ASYMPTOTIC_THRESHOLD: f64 = 1e8;

/// Confluent hypergeometric function of the second kind (Tricomi/Kummer U)
/// for a positive-integer first parameter and integer second parameter.
pub fn hyp_u<T: Real>(a: u32, b: i32, x: T) -> Result<T> {
    let scaled = hyp_u_scaled(a, b, x)?;
    let a_t = T::from_u32(a).unwrap();
    Ok((scaled.ln() - a_t * x.ln()).exp())
}

/// `x^a · U(a, b, x)`, which tends to 1 as x → ∞ and stays O(1) over the
/// whole argument range used by the MGF terms.
///
/// Evaluated from `U(a,b,x) = Γ(a)⁻¹ ∫₀^∞ e^{-xt} t^{a-1} (1+t)^{b-a-1} dt`
/// after substituting `t = e^v / x`.
pub fn hyp_u_scaled<T: Real>(a: u32, b: i32, x: T) -> Result<T> {
    if a < 1 {
        return domain("hyp_u requires a >= 1");
    }
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("hyp_u requires x > 0, got {x}"));
    }
    let a_t = T::from_u32(a).unwrap();
    let b_t = T::from_i32(b).unwrap();
    if x > T::lit(ASYMPTOTIC_THRESHOLD) {
        let c = a_t - b_t + T::one();
        let t1 = a_t * c / x;
        let t2 = a_t * (a_t + T::one()) * c * (c + T::one()) / (T::lit(2.0) * x * x);
        return Ok(T::one() - t1 + t2);
    }

    let tail_exp = b_t - a_t - T::one();
    let ln_gamma_a = ln_gamma_unchecked(a_t);
    let integrand = |v: T| {
        let u = v.exp();
        (-u + a_t * v + tail_exp * (u / x).ln_1p() - ln_gamma_a).exp()
    };

    let margin = -T::epsilon().ln() + T::lit(14.0);
    let ln_x = x.ln();
    let lo = ln_x.min(T::zero()) - margin / a_t;
    let hi = (T::lit(2.0) * (a_t + b_t.abs()) + T::lit(60.0)).ln();
    let mut points = vec![lo, hi];
    for p in [ln_x, T::zero(), (a_t + b_t.abs()).ln()] {
        if p > lo && p < hi {
            points.push(p);
        }
    }
    points.sort_by(|p, q| p.partial_cmp(q).unwrap());
    points.dedup();

    let spec = QuadratureSpec::relative(floor_tol(T::lit(1e-12)), 400);
    integrate_partitioned(integrand, &points, &spec)
}
