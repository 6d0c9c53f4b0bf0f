//! Distribution of the product Θ = A·B of two independent term-sum variables.
//!
//! Each pair of exponential-polynomial terms is integrated with
//! `∫₀^∞ a^{ν-1} e^{-βa - γ/a} da = 2 (γ/β)^{ν/2} K_ν(2√(βγ))`, so the
//! density and the survival function of Θ are both sums of
//! `c · θ^p · K_ν(β√θ)` terms.

use super::config::SelectionConfig;
use crate::error::{domain, Result};
use crate::specfun::{bessel_k, integrate_partitioned, QuadratureSpec};
use crate::terms::{ExpoTerm, ExpoTermSum};
use crate::Real;

/// One term `coeff · θ^power · K_order(scale·√θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselTerm<T> {
    pub coeff: T,
    pub power: T,
    pub order: i32,
    pub scale: T,
}

impl<T: Real> BesselTerm<T> {
    pub fn eval(&self, theta: T) -> Result<T> {
        let k = bessel_k(T::from_i32(self.order).unwrap(), self.scale * theta.sqrt())?;
        Ok(self.coeff * theta.powf(self.power) * k)
    }
}

/// Sum of [`BesselTerm`]s with the `(n_total, n_sel)` records of both factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTermSum<T> {
    terms: Vec<BesselTerm<T>>,
    pub source: ((usize, usize), (usize, usize)),
}

impl<T: Real> BesselTermSum<T> {
    pub fn terms(&self) -> &[BesselTerm<T>] {
        &self.terms
    }

    pub fn eval(&self, theta: T) -> Result<T> {
        if !(theta > T::zero()) {
            return domain(format!("density of Θ is evaluated at θ > 0, got {theta}"));
        }
        let mut acc = T::zero();
        for t in &self.terms {
            acc = acc + t.eval(theta)?;
        }
        Ok(acc)
    }

    /// One term per line: `coeff, power, order, scale`.
    pub fn dump(&self) -> String {
        self.terms
            .iter()
            .map(|t| {
                format!(
                    "{:.16e}, {:.16e}, {}, {:.16e}\n",
                    t.coeff.to_f64_lossy(),
                    t.power.to_f64_lossy(),
                    t.order,
                    t.scale.to_f64_lossy()
                )
            })
            .collect()
    }

    /// `∫₀^∞ weight(θ) · sum(θ) dθ` by adaptive quadrature in `v = ln θ`.
    ///
    /// This is a numerical route independent of the closed-form transforms,
    /// used to cross-check them.
    pub fn integrate_weighted(&self, weight: impl Fn(T) -> T) -> Result<T> {
        let min_scale = self.terms.iter().fold(T::infinity(), |a, t| a.min(t.scale));
        let max_power = self.terms.iter().fold(T::zero(), |a, t| a.max(t.power));
        if self.terms.is_empty() {
            return Ok(T::zero());
        }
        let root_hi = (T::lit(90.0) + T::lit(4.0) * max_power) / min_scale;
        let v_hi = T::lit(2.0) * root_hi.ln();
        let v_lo = T::lit(-40.0);
        let step = T::lit(2.5);
        let mut points = vec![v_lo];
        let mut v = v_lo + step;
        while v < v_hi {
            points.push(v);
            v = v + step;
        }
        points.push(v_hi);

        let mut failure = None;
        let integrand = |v: T| {
            let theta = v.exp();
            match self.eval(theta) {
                Ok(p) => weight(theta) * p * theta,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::nan()
                }
            }
        };
        let spec =
            QuadratureSpec::new(T::lit(1e-13).max(T::epsilon()), T::lit(1e-11).max(T::epsilon() * T::lit(64.0)), 400)?;
        let out = integrate_partitioned(integrand, &points, &spec);
        if let Some(e) = failure {
            return Err(e);
        }
        out
    }
}

fn pair_term<T: Real>(a: &ExpoTerm<T>, b: &ExpoTerm<T>, extra_a_power: i32) -> BesselTerm<T> {
    // ∫ cA a^{mA+extra} e^{-rA a} · cB (θ/a)^{mB} e^{-rB θ/a} da
    let nu = a.power as i32 + extra_a_power - b.power as i32 + 1;
    let nu_t = T::from_i32(nu).unwrap();
    let half = T::lit(0.5);
    let ratio = b.rate / a.rate;
    BesselTerm {
        coeff: T::lit(2.0) * a.coeff * b.coeff * ratio.powf(nu_t * half),
        power: T::from_u32(b.power).unwrap() + nu_t * half,
        order: nu,
        scale: T::lit(2.0) * (a.rate * b.rate).sqrt(),
    }
}

fn collect<T: Real>(raw: Vec<BesselTerm<T>>, source: ((usize, usize), (usize, usize))) -> BesselTermSum<T> {
    let mut terms: Vec<BesselTerm<T>> = Vec::new();
    for t in raw {
        let close = |x: T, y: T| (x - y).abs() <= T::lit(4.0) * T::epsilon() * x.abs().max(y.abs());
        match terms.iter_mut().find(|m| m.order == t.order && close(m.power, t.power) && close(m.scale, t.scale)) {
            Some(m) => m.coeff = m.coeff + t.coeff,
            None => terms.push(t),
        }
    }
    terms.retain(|t| t.coeff != T::zero());
    BesselTermSum { terms, source }
}

/// Closed-form density of Θ = A·B for independent A ~ `ts_a`, B ~ `ts_b`.
pub fn product_pdf<T: Real>(ts_a: &ExpoTermSum<T>, ts_b: &ExpoTermSum<T>) -> BesselTermSum<T> {
    // p_Θ(θ) = ∫ p_A(a) p_B(θ/a) a^{-1} da
    let raw = ts_a.terms().iter().flat_map(|a| ts_b.terms().iter().map(move |b| pair_term(a, b, -1))).collect();
    collect(raw, ((ts_a.n_total, ts_a.n_sel), (ts_b.n_total, ts_b.n_sel)))
}

/// Closed-form survival function `P(Θ > θ)` for Θ = A·B.
pub fn product_survival<T: Real>(ts_a: &ExpoTermSum<T>, ts_b: &ExpoTermSum<T>) -> BesselTermSum<T> {
    // P(Θ > θ) = ∫ p_A(a) S_B(θ/a) da
    let surv_b = ts_b.survival_sum();
    let raw = ts_a.terms().iter().flat_map(|a| surv_b.terms().iter().map(move |b| pair_term(a, b, 0))).collect();
    collect(raw, ((ts_a.n_total, ts_a.n_sel), (ts_b.n_total, ts_b.n_sel)))
}

/// Density of Θ for a selection configuration, evaluated at `theta > 0`.
pub fn pdf_theta<T: Real>(cfg: &SelectionConfig, theta: T) -> Result<T> {
    product_pdf(&cfg.tx_pdf(), &cfg.rx_pdf()).eval(theta)
}

/// `P(Θ ≤ θ)` for a selection configuration.
pub fn cdf_theta<T: Real>(cfg: &SelectionConfig, theta: T) -> Result<T> {
    if theta <= T::zero() {
        return Ok(T::zero());
    }
    Ok(T::one() - product_survival(&cfg.tx_pdf(), &cfg.rx_pdf()).eval(theta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::gsc_pdf;

    #[test]
    fn double_rayleigh_single_term() {
        let one = gsc_pdf::<f64>(1, 1).unwrap();
        let p = product_pdf(&one, &one);
        assert_eq!(p.terms(), &[BesselTerm { coeff: 2.0, power: 0.0, order: 0, scale: 2.0 }]);
        let k0_2 = 0.113_893_872_749_533_4;
        assert!((p.eval(1.0).unwrap() - 2.0 * k0_2).abs() < 1e-12);
        assert!((p.eval(1.0).unwrap() - 0.2278).abs() < 1e-4);
    }

    #[test]
    fn full_tx_pair_single_rx() {
        let cfg = SelectionConfig::new(2, 1, 2, 1).unwrap();
        let p = product_pdf(&cfg.tx_pdf::<f64>(), &cfg.rx_pdf());
        assert_eq!(p.terms().len(), 1);
        let t = p.terms()[0];
        assert_eq!((t.coeff, t.power, t.order.abs(), t.scale), (2.0, 0.5, 1, 2.0));
        let mass = p.integrate_weighted(|_| 1.0).unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn domain_error_at_zero() {
        let cfg = SelectionConfig::full(1, 1).unwrap();
        assert!(pdf_theta::<f64>(&cfg, 0.0).is_err());
        assert!(pdf_theta::<f64>(&cfg, -1.0).is_err());
    }

    #[test]
    fn normalization_and_mean_over_grid() {
        for cfg in SelectionConfig::all_up_to(3, 3) {
            let a = cfg.tx_pdf::<f64>();
            let b = cfg.rx_pdf::<f64>();
            let p = product_pdf(&a, &b);
            let mass = p.integrate_weighted(|_| 1.0).unwrap();
            assert!((mass - 1.0).abs() < 1e-7, "{cfg}: mass {mass}");
            let mean = p.integrate_weighted(|t| t).unwrap();
            assert!((mean - a.mean() * b.mean()).abs() < 1e-6, "{cfg}: mean {mean}");
        }
    }

    #[test]
    fn survival_is_tail_integral_of_density() {
        let cfg = SelectionConfig::new(3, 4, 2, 2).unwrap();
        let a = cfg.tx_pdf::<f64>();
        let b = cfg.rx_pdf::<f64>();
        let p = product_pdf(&a, &b);
        let surv = product_survival(&a, &b);
        for &theta in &[0.05f64, 0.5, 2.0, 6.0, 15.0] {
            let spec = QuadratureSpec::new(1e-13, 1e-11, 400).unwrap();
            let lower = integrate_partitioned(
                |v: f64| {
                    let t = v.exp();
                    p.eval(t).unwrap() * t
                },
                &[-40.0, -20.0, -5.0, theta.ln()],
                &spec,
            )
            .unwrap();
            let s = surv.eval(theta).unwrap();
            assert!((lower + s - 1.0).abs() < 1e-9, "θ={theta}: {lower} + {s}");
        }
    }
}
