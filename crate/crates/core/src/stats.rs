//! Small statistical helpers shared by the validation checks.

/// Kolmogorov–Smirnov statistic `sup |F_n(x) - F(x)|` of sorted samples
/// against a CDF.
pub fn ks_statistic(sorted: &[f64], mut cdf: impl FnMut(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        let lo = f - i as f64 / n;
        let hi = (i + 1) as f64 / n - f;
        d.max(lo).max(hi)
    })
}

/// Asymptotic Kolmogorov survival function `P(√n·D > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut acc = 0.0;
    for k in 1..=100 {
        let k = f64::from(k);
        let term = (-2.0 * k * k * lambda * lambda).exp();
        acc += if k as u32 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * acc).clamp(0.0, 1.0)
}

/// p-value of a KS statistic `d` from `n` samples.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_survival(d * (n as f64).sqrt())
}

/// Critical KS distance at significance `alpha`, from the leading term of
/// the Kolmogorov distribution.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// A CDF tabulated on an increasing grid and linearly interpolated, clamped
/// to the end values outside the grid.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must be increasing");
        Self { grid, values }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => self.values[i],
            Err(0) => self.values[0],
            Err(i) if i == self.grid.len() => self.values[i - 1],
            Err(i) => {
                let (x0, x1) = (self.grid[i - 1], self.grid[i]);
                let t = (x - x0) / (x1 - x0);
                self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
            }
        }
    }
}

/// `count` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_at_one_in_a_thousand() {
        let c = ks_critical(1_000_000, 1e-3);
        assert!((c * 1000.0 - 1.9495).abs() < 1e-3);
        assert!((kolmogorov_survival(1.9495) - 1e-3).abs() < 1e-5);
    }

    #[test]
    fn ks_of_exact_uniform_grid() {
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&samples, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn interpolation() {
        let t = TabulatedCdf::new(vec![0.0, 1.0, 3.0], vec![0.0, 0.5, 1.0]);
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(0.5), 0.25);
        assert_eq!(t.eval(2.0), 0.75);
        assert_eq!(t.eval(5.0), 1.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-3, 10.0, 5);
        assert!((g[0] - 1e-3).abs() < 1e-15 && (g[4] - 10.0).abs() < 1e-12);
    }
}
