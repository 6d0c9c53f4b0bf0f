//! Closed-form moment generating function of Θ = A·B.
//!
//! For a term pair `(cA a^{mA} e^{-rA a}) × (cB b^{mB} e^{-rB b})` the
//! contribution to `E{e^{-sAB}}` is
//! `cA cB mA! mB! rA^{mB-mA} · s^{-(mB+1)} · U(mB+1, mB+1-mA, rA rB / s)`,
//! so every term has the shape `x₁ · s^{-x₂} · U(x₂, x₃, x₄/s)`.

use super::config::SelectionConfig;
use crate::error::{domain, Error, Result};
use crate::specfun::gamma::factorial;
use crate::specfun::hyp_u_scaled;
use crate::terms::{ExpoTerm, ExpoTermSum};
use crate::Real;

/// `coeff · s^{-a} · U(a, b, scale / s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfTerm<T> {
    pub coeff: T,
    pub a: u32,
    pub b: i32,
    pub scale: T,
}

impl<T: Real> MgfTerm<T> {
    fn from_pair(ta: &ExpoTerm<T>, tb: &ExpoTerm<T>) -> Self {
        let shift = tb.power as i32 - ta.power as i32;
        Self {
            coeff: ta.coeff * tb.coeff * factorial::<T>(ta.power) * factorial::<T>(tb.power) * ta.rate.powi(shift),
            a: tb.power + 1,
            b: shift + 1,
            scale: ta.rate * tb.rate,
        }
    }

    /// Value at `s > 0`, computed as `coeff · scale^{-a} · (x^a U(a,b,x))`
    /// with `x = scale/s` so no intermediate overflows as s → 0.
    pub fn eval(&self, s: T) -> Result<T> {
        let a = T::from_u32(self.a).unwrap();
        let scaled = hyp_u_scaled(self.a, self.b, self.scale / s)?;
        Ok(self.coeff * (-a * self.scale.ln()).exp() * scaled)
    }

    /// Limit of the term as s → 0.
    pub fn at_origin(&self) -> T {
        self.coeff * self.scale.powi(-(self.a as i32))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MgfTermSum<T> {
    terms: Vec<MgfTerm<T>>,
}

impl<T: Real> MgfTermSum<T> {
    /// MGF of Θ = A·B for independent A ~ `ts_a`, B ~ `ts_b`.
    pub fn from_pdfs(ts_a: &ExpoTermSum<T>, ts_b: &ExpoTermSum<T>) -> Self {
        let mut terms: Vec<MgfTerm<T>> = Vec::new();
        for ta in ts_a.terms() {
            for tb in ts_b.terms() {
                let t = MgfTerm::from_pair(ta, tb);
                let close = (T::lit(4.0) * T::epsilon()) * t.scale;
                match terms.iter_mut().find(|m| m.a == t.a && m.b == t.b && (m.scale - t.scale).abs() <= close) {
                    Some(m) => m.coeff = m.coeff + t.coeff,
                    None => terms.push(t),
                }
            }
        }
        terms.retain(|t| t.coeff != T::zero());
        Self { terms }
    }

    pub fn for_config(cfg: &SelectionConfig) -> Self {
        Self::from_pdfs(&cfg.tx_pdf(), &cfg.rx_pdf())
    }

    pub fn terms(&self) -> &[MgfTerm<T>] {
        &self.terms
    }

    /// `E{e^{-sΘ}}` for `s ≥ 0`; `s = 0` returns 1 without evaluating U.
    pub fn eval(&self, s: T) -> Result<T> {
        if s.is_nan() || s < T::zero() {
            return domain(format!("MGF argument must be non-negative, got {s}"));
        }
        if s == T::zero() {
            return Ok(T::one());
        }
        if s.is_infinite() {
            return Ok(T::zero());
        }
        let mut acc = T::zero();
        for t in &self.terms {
            acc = acc + t.eval(s)?;
        }
        Ok(acc)
    }

    /// One term per line: `x1, x2, x3, x4` for `x1 · s^{-x2} · U(x2, x3, x4/s)`.
    pub fn dump(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{:.16e}, {}, {}, {:.16e}\n", t.coeff.to_f64_lossy(), t.a, t.b, t.scale.to_f64_lossy()))
            .collect()
    }
}

/// `E{e^{-sΘ}}` with Θ = A·B, A ~ `ts_a`, B ~ `ts_b`.
pub fn mgf<T: Real>(ts_a: &ExpoTermSum<T>, ts_b: &ExpoTermSum<T>, s: T) -> Result<T> {
    MgfTermSum::from_pdfs(ts_a, ts_b).eval(s)
}

/// Receive-only (or no) selection: A is Erlang(K) so the MGF collapses to a
/// single sum over the terms of B,
/// `Σ c · m! · s^{-(m+1)} · U(m+1, m+2-K, r/s)`.
pub fn mgf_receive_selection<T: Real>(cfg: &SelectionConfig, s: T) -> Result<T> {
    if cfg.k_s() != cfg.k() {
        return Err(Error::Domain(format!("receive-selection form needs K_s = K, got {cfg}")));
    }
    if s.is_nan() || s < T::zero() {
        return domain(format!("MGF argument must be non-negative, got {s}"));
    }
    if s == T::zero() {
        return Ok(T::one());
    }
    let k = cfg.k() as i32;
    let mut acc = T::zero();
    for t in cfg.rx_pdf::<T>().terms() {
        let a = t.power + 1;
        let a_t = T::from_u32(a).unwrap();
        let u = hyp_u_scaled(a, a as i32 + 1 - k, t.rate / s)?;
        acc = acc + t.coeff * factorial::<T>(t.power) * (-a_t * t.rate.ln()).exp() * u;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hyp_u;
    use crate::terms::gsc_pdf;

    #[test]
    fn unit_at_origin() {
        for cfg in SelectionConfig::all_up_to(4, 4) {
            let m = MgfTermSum::<f64>::for_config(&cfg);
            assert_eq!(m.eval(0.0).unwrap(), 1.0);
            let limit: f64 = m.terms().iter().map(MgfTerm::at_origin).sum();
            assert!((limit - 1.0).abs() < 1e-10, "{cfg}: {limit}");
        }
    }

    #[test]
    fn double_rayleigh_value() {
        let one = gsc_pdf::<f64>(1, 1).unwrap();
        let v = mgf(&one, &one, 1.0).unwrap();
        assert!((v - hyp_u(1, 1, 1.0).unwrap()).abs() < 1e-14);
        assert!((v - 0.596_347_4).abs() < 1e-7);
    }

    #[test]
    fn decreasing_and_vanishing() {
        let cfg = SelectionConfig::full(1, 1).unwrap();
        let m = MgfTermSum::<f64>::for_config(&cfg);
        let mut prev = 1.0;
        for i in 1..60 {
            let s = 10f64.powf(-3.0 + 0.15 * f64::from(i));
            let v = m.eval(s).unwrap();
            assert!(v < prev, "s={s}");
            prev = v;
        }
        assert!(prev < 1e-4);
        assert_eq!(m.eval(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn terms_have_the_u_shape() {
        // s-exponent equals minus the first U parameter.
        let cfg = SelectionConfig::new(4, 4, 2, 2).unwrap();
        let m = MgfTermSum::<f64>::for_config(&cfg);
        for t in m.terms() {
            let s = 0.37f64;
            let direct = t.coeff * s.powi(-(t.a as i32)) * hyp_u(t.a, t.b, t.scale / s).unwrap();
            assert!((direct - t.eval(s).unwrap()).abs() < 1e-12 * direct.abs().max(1e-300));
        }
    }

    #[test]
    fn negative_argument_rejected() {
        let cfg = SelectionConfig::full(2, 2).unwrap();
        assert!(MgfTermSum::<f64>::for_config(&cfg).eval(-0.1).is_err());
        assert!(mgf_receive_selection::<f64>(&cfg, -0.1).is_err());
    }

    #[test]
    fn receive_selection_form_agrees() {
        for k in 1..=4 {
            for n in 1..=5 {
                for n_s in 1..=n {
                    let cfg = SelectionConfig::new(k, n, k, n_s).unwrap();
                    for &s in &[0.0, 0.01, 0.5, 1.0, 7.0, 300.0] {
                        let a = mgf_receive_selection::<f64>(&cfg, s).unwrap();
                        let b = MgfTermSum::for_config(&cfg).eval(s).unwrap();
                        assert!((a - b).abs() <= 1e-12, "{cfg} s={s}: {a} vs {b}");
                    }
                }
            }
        }
        let tx = SelectionConfig::new(3, 2, 1, 2).unwrap();
        assert!(mgf_receive_selection::<f64>(&tx, 1.0).is_err());
    }

    #[test]
    fn factorizes_when_one_side_is_degenerate() {
        // With A ≡ Exp(1) and B ≡ Exp(1) swapped the MGF is symmetric.
        let a = gsc_pdf::<f64>(3, 1).unwrap();
        let b = gsc_pdf::<f64>(2, 2).unwrap();
        for &s in &[0.1, 1.0, 4.0] {
            let ab = mgf(&a, &b, s).unwrap();
            let ba = mgf(&b, &a, s).unwrap();
            assert!((ab - ba).abs() < 1e-11);
        }
    }
}
