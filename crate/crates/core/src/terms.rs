//! Exponential-polynomial term sums and the generalized-selection pdf.
//!
//! Every single-hop selected SNR in this crate is a finite sum
//! `Σ c · x^m · e^{-r·x}`. The sum of the `n_sel` largest of `n_total`
//! i.i.d. unit-mean exponentials has exactly this form: by the Rényi
//! spacing representation it equals an Erlang(n_sel) variable plus
//! independent exponentials of rates `j / n_sel`, `j = n_sel+1..=n_total`,
//! and the partial-fraction expansion of the product of their Laplace
//! transforms gives the terms. The expansion is carried out in exact
//! rational arithmetic before conversion to `T`.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::specfun::ln_gamma;
use crate::Real;

/// One term `coeff · x^power · e^{-rate·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpoTerm<T> {
    pub coeff: T,
    pub power: u32,
    pub rate: T,
}

impl<T: Real> ExpoTerm<T> {
    pub fn eval(&self, x: T) -> T {
        if self.power == 0 {
            self.coeff * (-self.rate * x).exp()
        } else if x == T::zero() {
            T::zero()
        } else {
            let m = T::from_u32(self.power).unwrap();
            self.coeff * (m * x.ln() - self.rate * x).exp()
        }
    }

    /// `∫₀^∞ x^k · term dx`.
    pub fn moment(&self, k: u32) -> T {
        let order = self.power + k;
        let n = T::from_u32(order + 1).unwrap();
        self.coeff * (ln_gamma(n).unwrap() - n * self.rate.ln()).exp()
    }

    /// `∫₀^x term dt`, computed without cancellation for small `rate·x`.
    pub fn integral_to(&self, x: T) -> T {
        let y = self.rate * x;
        let m = self.power;
        let total = self.moment(0);
        if y <= T::zero() {
            return T::zero();
        }
        let mf = T::from_u32(m).unwrap();
        if y < mf + T::one() {
            // e^{-y} Σ_{j>m} y^j / j!
            let mut term = (mf + T::one()) * y.ln() - ln_gamma(mf + T::lit(2.0)).unwrap() - y;
            let mut acc = T::zero();
            let mut j = mf + T::one();
            loop {
                let t = term.exp();
                acc = acc + t;
                if t <= acc * T::epsilon() {
                    break;
                }
                j = j + T::one();
                term = term + y.ln() - j.ln();
            }
            total * acc
        } else {
            total - self.survival_at(x)
        }
    }

    /// `∫_x^∞ term dt`.
    pub fn survival_at(&self, x: T) -> T {
        self.survival_terms().iter().map(|t| t.eval(x)).sum()
    }

    /// Terms of `∫_x^∞ term dt` as a function of x:
    /// `c · m! / r^{m+1} · e^{-rx} Σ_{j=0..m} (rx)^j / j!`.
    pub fn survival_terms(&self) -> Vec<ExpoTerm<T>> {
        let total = self.moment(0);
        (0..=self.power)
            .map(|j| {
                let jf = T::from_u32(j).unwrap();
                let scale = (jf * self.rate.ln() - ln_gamma(jf + T::one()).unwrap()).exp();
                ExpoTerm { coeff: total * scale, power: j, rate: self.rate }
            })
            .collect()
    }
}

/// A finite sum of [`ExpoTerm`]s tagged with the `(n_total, n_sel)` pair it
/// represents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpoTermSum<T> {
    terms: Vec<ExpoTerm<T>>,
    // Exact rational terms when the sum was built from them; moments are
    // then integrated without the cancellation that large alternating
    // coefficients cause in floating point.
    exact: Option<Arc<Vec<ExactTerm>>>,
    pub n_total: usize,
    pub n_sel: usize,
}

/// `(coeff, power, rate)` in exact arithmetic.
pub type ExactTerm = (BigRational, u32, BigRational);

impl<T: Real> ExpoTermSum<T> {
    /// Builds a sum, merging equal `(power, rate)` pairs and dropping zero
    /// and negligible coefficients. Rates must be positive.
    pub fn from_terms(terms: impl IntoIterator<Item = ExpoTerm<T>>, n_total: usize, n_sel: usize) -> Result<Self> {
        let mut merged: Vec<ExpoTerm<T>> = Vec::new();
        for t in terms {
            if !(t.rate > T::zero()) || !t.rate.is_finite() {
                return domain(format!("term rate must be positive, got {}", t.rate));
            }
            if !t.coeff.is_finite() {
                return domain("term coefficient must be finite");
            }
            match merged.iter_mut().find(|m| m.power == t.power && same_rate(m.rate, t.rate)) {
                Some(m) => m.coeff = m.coeff + t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != T::zero());
        merged.sort_by(|a, b| a.rate.partial_cmp(&b.rate).unwrap().then(a.power.cmp(&b.power)));
        Ok(Self { terms: merged, exact: None, n_total, n_sel })
    }

    /// Builds a sum from exact terms, keeping them for moment evaluation.
    pub fn from_exact(exact: Vec<ExactTerm>, n_total: usize, n_sel: usize) -> Result<Self> {
        let to_t = |q: &BigRational| q.to_f64().map(T::lit).filter(|v| v.is_finite());
        let mut terms = Vec::with_capacity(exact.len());
        for (c, m, r) in &exact {
            if !r.is_positive() {
                return domain("term rate must be positive");
            }
            match (to_t(c), to_t(r)) {
                (Some(coeff), Some(rate)) => terms.push(ExpoTerm { coeff, power: *m, rate }),
                _ => return domain("exact term not representable"),
            }
        }
        let mut sum = Self::from_terms(terms, n_total, n_sel)?;
        sum.exact = Some(Arc::new(exact));
        Ok(sum)
    }

    /// Exact terms, if the sum was built from them.
    pub fn exact_terms(&self) -> Option<&[ExactTerm]> {
        self.exact.as_deref().map(Vec::as_slice)
    }

    pub fn terms(&self) -> &[ExpoTerm<T>] {
        &self.terms
    }

    /// Density at `x ≥ 0`. Terms sharing a rate are combined before the
    /// exponential factor is applied.
    pub fn eval(&self, x: T) -> T {
        let mut total = T::zero();
        let mut i = 0;
        while i < self.terms.len() {
            let rate = self.terms[i].rate;
            let mut poly = T::zero();
            let mut j = i;
            while j < self.terms.len() && self.terms[j].rate == rate {
                let t = &self.terms[j];
                poly = poly + if t.power == 0 { t.coeff } else { t.coeff * x.powi(t.power as i32) };
                j += 1;
            }
            let scaled = poly * (-rate * x).exp();
            total = total + if scaled.is_finite() { scaled } else { self.terms[i..j].iter().map(|t| t.eval(x)).sum() };
            i = j;
        }
        total
    }

    /// `Σ |c x^m e^{-r x}|`: the scale of rounding error in [`Self::eval`].
    pub fn eval_magnitude(&self, x: T) -> T {
        self.terms.iter().map(|t| t.eval(x).abs()).sum()
    }

    /// Total mass `∫₀^∞`, from closed-form term integrals.
    pub fn total_mass(&self) -> T {
        self.moment(0)
    }

    /// `E{X}` of the represented distribution.
    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn moment(&self, k: u32) -> T {
        match &self.exact {
            Some(exact) => {
                let q = exact_moment(exact, k);
                T::lit(q.to_f64().unwrap_or(f64::NAN))
            }
            None => self.terms.iter().map(|t| t.moment(k)).sum(),
        }
    }

    pub fn cdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        self.terms.iter().map(|t| t.integral_to(x)).sum()
    }

    pub fn survival(&self, x: T) -> T {
        if x <= T::zero() {
            return self.total_mass();
        }
        self.terms.iter().map(|t| t.survival_at(x)).sum()
    }

    /// The survival function `P(X > x)` as a term sum of its own.
    pub fn survival_sum(&self) -> ExpoTermSum<T> {
        let terms = self.terms.iter().flat_map(|t| t.survival_terms());
        Self::from_terms(terms, self.n_total, self.n_sel).expect("survival of a valid sum is valid")
    }

    /// Laplace transform `E{e^{-sX}}`, `s ≥ 0`.
    pub fn laplace(&self, s: T) -> T {
        self.terms
            .iter()
            .map(|t| {
                let n = T::from_u32(t.power + 1).unwrap();
                t.coeff * (ln_gamma(n).unwrap() - n * (t.rate + s).ln()).exp()
            })
            .sum()
    }

    /// One term per line: `coeff, power, rate`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let _ = writeln!(out, "{:.16e}, {}, {:.16e}", t.coeff.to_f64_lossy(), t.power, t.rate.to_f64_lossy());
        }
        out
    }
}

/// `∫ x^k · Σ c x^m e^{-r x} dx = Σ c (m+k)! / r^{m+k+1}`, exactly.
pub fn exact_moment(terms: &[ExactTerm], k: u32) -> BigRational {
    let mut total = BigRational::zero();
    for (c, m, r) in terms {
        let n = m + k;
        let mut v = c.clone();
        for i in 1..=n {
            v *= BigRational::from_integer(BigInt::from(i));
        }
        for _ in 0..=n {
            v /= r;
        }
        total += v;
    }
    total
}

fn same_rate<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(4.0) * T::epsilon() * a.abs().max(b.abs())
}

/// Exact pdf of the sum of the `n_sel` largest of `n_total` i.i.d.
/// unit-mean exponential variables.
pub fn gsc_pdf<T: Real>(n_total: usize, n_sel: usize) -> Result<ExpoTermSum<T>> {
    if n_sel == 0 || n_sel > n_total {
        return domain(format!("need 1 <= n_sel <= n_total, got n_sel={n_sel}, n_total={n_total}"));
    }
    ExpoTermSum::from_exact(gsc_terms_exact(n_total, n_sel), n_total, n_sel)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `(coeff, power, rate)` triples for [`gsc_pdf`].
pub fn gsc_terms_exact(n_total: usize, n_sel: usize) -> Vec<ExactTerm> {
    let l = n_sel as i64;
    let rates: Vec<BigRational> = ((l + 1)..=(n_total as i64)).map(|j| rat(j, l)).collect();
    let one = BigRational::one();
    let mut out = Vec::new();

    // Pole of order n_sel at rate 1: Taylor coefficients of
    // G(-1 + u) = Π_j r_j / (r_j - 1 + u) up to u^{n_sel-1}.
    let mut series = vec![BigRational::zero(); n_sel];
    series[0] = one.clone();
    for r in &rates {
        let d = r - &one;
        let lead = r / &d;
        // multiply by lead · Σ_k (-u/d)^k
        let mut factor = Vec::with_capacity(n_sel);
        let mut p = lead;
        for _ in 0..n_sel {
            factor.push(p.clone());
            p = -p / &d;
        }
        let mut next = vec![BigRational::zero(); n_sel];
        for (i, a) in series.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, f) in factor.iter().enumerate().take(n_sel - i) {
                next[i + k] += a * f;
            }
        }
        series = next;
    }
    let mut fact = BigRational::one();
    for k in 1..=n_sel {
        // coefficient of 1/(s+1)^k is series[n_sel - k]; inverse transform x^{k-1}/(k-1)!
        if k > 1 {
            fact *= rat(k as i64 - 1, 1);
        }
        let c = &series[n_sel - k] / &fact;
        if !c.is_zero() {
            out.push((c, (k - 1) as u32, one.clone()));
        }
    }

    // Simple poles at rates j / n_sel.
    for (idx, rj) in rates.iter().enumerate() {
        let mut c = rj.clone();
        let denom = &one - rj;
        for _ in 0..n_sel {
            c /= &denom;
        }
        for (other, ri) in rates.iter().enumerate() {
            if other != idx {
                c *= ri / (ri - rj);
            }
        }
        out.push((c, 0, rj.clone()));
    }
    out
}
