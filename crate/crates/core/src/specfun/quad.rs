use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::Real;

/// Number of Gauss–Legendre nodes per panel.
pub const PANEL_ORDER: usize = 32;

/// Tolerances and subdivision budget for [`integrate_finite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > T::zero()) || !(rel_tol > T::zero()) {
            return domain("quadrature tolerances must be positive");
        }
        if max_subdivisions == 0 {
            return domain("max_subdivisions must be at least 1");
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions })
    }

    /// Purely relative tolerance, for integrands whose scale is unknown.
    pub(crate) fn relative(rel_tol: T, max_subdivisions: usize) -> Self {
        Self { abs_tol: T::min_positive_value(), rel_tol: floor_tol(rel_tol), max_subdivisions }
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self { abs_tol: floor_tol(T::lit(1e-12)), rel_tol: floor_tol(T::lit(1e-10)), max_subdivisions: 64 }
    }
}

/// Clamp a requested tolerance to something the scalar type can deliver.
pub(crate) fn floor_tol<T: Real>(tol: T) -> T {
    tol.max(T::epsilon() * T::lit(64.0))
}

/// Nodes and weights of the `PANEL_ORDER`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre_nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| legendre_rule(PANEL_ORDER))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> T {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = T::zero();
    for &(x, w) in gauss_legendre_nodes() {
        acc = acc + T::lit(w) * f(mid + half * T::lit(x));
    }
    acc * half
}

struct Piece<T> {
    lo: T,
    hi: T,
    left: T,
    right: T,
    err: T,
}

impl<T: Real> Piece<T> {
    fn build<F: FnMut(T) -> T>(f: &mut F, lo: T, hi: T, whole: T) -> Self {
        let mid = (lo + hi) * T::lit(0.5);
        let left = panel(f, lo, mid);
        let right = panel(f, mid, hi);
        let err = (whole - (left + right)).abs();
        Self { lo, hi, left, right, err }
    }

    fn estimate(&self) -> T {
        self.left + self.right
    }
}

/// Adaptive Gauss–Legendre integral of `f` over `[lo, hi]`.
///
/// Each panel is compared against its two halves; the panel with the largest
/// discrepancy is bisected until the summed discrepancy falls below
/// `max(abs_tol, rel_tol·|I|)` or the subdivision budget runs out.
pub fn integrate_finite<T: Real, F: FnMut(T) -> T>(f: F, lo: T, hi: T, spec: &QuadratureSpec<T>) -> Result<T> {
    integrate_partitioned(f, &[lo, hi], spec)
}

/// Like [`integrate_finite`] but starting from an initial partition given by
/// the sorted `points` (at least two), so known features can be isolated.
pub fn integrate_partitioned<T: Real, F: FnMut(T) -> T>(mut f: F, points: &[T], spec: &QuadratureSpec<T>) -> Result<T> {
    if points.len() < 2 {
        return domain("integration needs at least two breakpoints");
    }
    if points.iter().any(|p| !p.is_finite()) {
        return domain("integration limits must be finite");
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return domain("integration limits must be ordered lo <= hi");
    }
    let mut pieces: Vec<Piece<T>> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let whole = panel(&mut f, w[0], w[1]);
            Piece::build(&mut f, w[0], w[1], whole)
        })
        .collect();
    if pieces.is_empty() {
        return Ok(T::zero());
    }

    let mut splits = 0;
    loop {
        let total: T = pieces.iter().map(Piece::estimate).sum();
        let residual: T = pieces.iter().map(|p| p.err).sum();
        if !total.is_finite() || !residual.is_finite() {
            return Err(Error::Accuracy { estimate: total.to_f64_lossy(), residual: f64::INFINITY });
        }
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if residual <= target {
            return Ok(total);
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::Accuracy { estimate: total.to_f64_lossy(), residual: residual.to_f64_lossy() });
        }
        let (worst, _) =
            pieces
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, p)| if p.err > be { (i, p.err) } else { (bi, be) });
        let p = pieces.swap_remove(worst);
        let mid = (p.lo + p.hi) * T::lit(0.5);
        if !(mid > p.lo && mid < p.hi) {
            // Interval can no longer be bisected in this precision.
            return Err(Error::Accuracy { estimate: total.to_f64_lossy(), residual: residual.to_f64_lossy() });
        }
        pieces.push(Piece::build(&mut f, p.lo, mid, p.left));
        pieces.push(Piece::build(&mut f, mid, p.hi, p.right));
        splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_weights_sum_to_two() {
        let s: f64 = gauss_legendre_nodes().iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert_eq!(gauss_legendre_nodes().len(), PANEL_ORDER);
    }

    #[test]
    fn textbook_integrals() {
        let spec = QuadratureSpec::default();
        let a = integrate_finite(f64::sin, 0.0, PI, &spec).unwrap();
        assert!((a - 2.0).abs() < 1e-13);
        let b = integrate_finite(|x: f64| x * x, 0.0, 1.0, &spec).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
        let c = integrate_finite(|x: f64| x.sin().powi(2), 0.0, PI / 2.0, &spec).unwrap();
        assert!((c - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn single_panel_is_exact_for_degree_63() {
        // Monomials up to 2n-1 on [0, 1]: a single panel must already be exact.
        for deg in [0, 1, 7, 31, 62, 63] {
            let exact = 1.0 / (deg as f64 + 1.0);
            let est = panel(&mut |x: f64| x.powi(deg), 0.0, 1.0);
            assert!((est - exact).abs() < 4.0 * f64::EPSILON, "degree {deg}: {est} vs {exact}");
        }
    }

    #[test]
    fn empty_interval_is_zero() {
        let spec = QuadratureSpec::default();
        assert_eq!(integrate_finite(|x: f64| x, 3.0, 3.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn reversed_limits_rejected() {
        let spec = QuadratureSpec::default();
        assert!(matches!(integrate_finite(|x: f64| x, 1.0, 0.0, &spec), Err(Error::Domain(_))));
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let spec = QuadratureSpec::new(1e-15, 1e-15, 1).unwrap();
        // 1/sqrt(x) singularity cannot converge in one split.
        match integrate_finite(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec) {
            Err(Error::Accuracy { estimate, residual }) => {
                assert!(estimate > 1.5 && estimate < 2.0);
                assert!(residual > 0.0);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-3, 4).is_err());
        assert!(QuadratureSpec::new(1e-3, -1.0, 4).is_err());
        assert!(QuadratureSpec::new(1e-3, 1e-3, 0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let spec = QuadratureSpec::<f32>::default();
        let a = integrate_finite(f32::sin, 0.0, std::f32::consts::PI, &spec).unwrap();
        assert!((a - 2.0).abs() < 1e-5);
    }
}
