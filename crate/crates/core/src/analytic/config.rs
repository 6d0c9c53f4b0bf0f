use crate::error::{Error, Result};
use crate::terms::{gsc_pdf, ExpoTermSum};
use crate::Real;

/// Which side(s) of the link perform antenna selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    None,
    TxOnly,
    RxOnly,
    Joint,
}

impl SelectionMode {
    fn implied(k: usize, n: usize, k_s: usize, n_s: usize) -> Self {
        match (k_s < k, n_s < n) {
            (false, false) => SelectionMode::None,
            (true, false) => SelectionMode::TxOnly,
            (false, true) => SelectionMode::RxOnly,
            (true, true) => SelectionMode::Joint,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMode::None => "none",
            SelectionMode::TxOnly => "tx_only",
            SelectionMode::RxOnly => "rx_only",
            SelectionMode::Joint => "joint",
        }
    }
}

/// Antenna counts at source (`k`) and destination (`n`) and how many of each
/// are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SelectionConfig {
    k: usize,
    n: usize,
    k_s: usize,
    n_s: usize,
    mode: SelectionMode,
}

impl SelectionConfig {
    /// The selection mode is implied by which counts are reduced.
    pub fn new(k: usize, n: usize, k_s: usize, n_s: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::Config(format!("antenna counts must be positive (K={k}, N={n})")));
        }
        if k_s == 0 || k_s > k {
            return Err(Error::Config(format!("need 1 <= K_s <= K, got K_s={k_s}, K={k}")));
        }
        if n_s == 0 || n_s > n {
            return Err(Error::Config(format!("need 1 <= N_s <= N, got N_s={n_s}, N={n}")));
        }
        Ok(Self { k, n, k_s, n_s, mode: SelectionMode::implied(k, n, k_s, n_s) })
    }

    /// Like [`SelectionConfig::new`] but also checks a stated mode against the counts.
    pub fn with_mode(k: usize, n: usize, k_s: usize, n_s: usize, mode: SelectionMode) -> Result<Self> {
        let cfg = Self::new(k, n, k_s, n_s)?;
        if cfg.mode != mode {
            return Err(Error::Config(format!(
                "mode {} inconsistent with K={k}, N={n}, K_s={k_s}, N_s={n_s} (implies {})",
                mode.as_str(),
                cfg.mode.as_str()
            )));
        }
        Ok(cfg)
    }

    /// Full arrays, no selection.
    pub fn full(k: usize, n: usize) -> Result<Self> {
        Self::new(k, n, k, n)
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k_s(&self) -> usize {
        self.k_s
    }
    pub fn n_s(&self) -> usize {
        self.n_s
    }
    pub fn mode(&self) -> SelectionMode {
        self.mode
    }

    /// Pdf of A = sum of the K_s strongest source→relay gains.
    pub fn tx_pdf<T: Real>(&self) -> ExpoTermSum<T> {
        gsc_pdf(self.k, self.k_s).expect("validated counts")
    }

    /// Pdf of B = sum of the N_s strongest relay→destination gains.
    pub fn rx_pdf<T: Real>(&self) -> ExpoTermSum<T> {
        gsc_pdf(self.n, self.n_s).expect("validated counts")
    }

    /// Every configuration with `k <= max_k` and `n <= max_n`.
    pub fn all_up_to(max_k: usize, max_n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for k in 1..=max_k {
            for k_s in 1..=k {
                for n in 1..=max_n {
                    for n_s in 1..=n {
                        out.push(Self::new(k, n, k_s, n_s).unwrap());
                    }
                }
            }
        }
        out
    }
}

impl std::fmt::Display for SelectionConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K={} N={} Ks={} Ns={} ({})", self.k, self.n, self.k_s, self.n_s, self.mode.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Psk,
    Qam,
}

/// M-PSK or square M-QAM constellation descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Constellation {
    modulation: Modulation,
    order: u32,
}

impl Constellation {
    pub fn new(modulation: Modulation, order: u32) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Config(format!("constellation order must be a power of two >= 2, got {order}")));
        }
        if modulation == Modulation::Qam && !order.trailing_zeros().is_multiple_of(2) {
            return Err(Error::Config(format!("square QAM needs an even power of two, got {order}")));
        }
        Ok(Self { modulation, order })
    }

    pub fn psk(order: u32) -> Result<Self> {
        Self::new(Modulation::Psk, order)
    }

    pub fn qam(order: u32) -> Result<Self> {
        Self::new(Modulation::Qam, order)
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// κ = log2 M.
    pub fn bits_per_symbol(&self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Points per real dimension of a square QAM (√M).
    pub fn side(&self) -> u32 {
        1 << (self.bits_per_symbol() / 2)
    }

    /// sin²(π/M) for PSK, 3 / (2(M-1)) for QAM.
    pub fn g_factor<T: Real>(&self) -> T {
        let m = T::from_u32(self.order).unwrap();
        match self.modulation {
            Modulation::Psk => (T::PI() / m).sin().powi(2),
            Modulation::Qam => T::lit(3.0) / (T::lit(2.0) * (m - T::one())),
        }
    }

    /// q = 1 - 1/√M (meaningful for QAM).
    pub fn q<T: Real>(&self) -> T {
        T::one() - T::one() / T::from_u32(self.order).unwrap().sqrt()
    }

    /// SER at zero SNR: (M-1)/M for both families.
    pub fn zero_snr_ser<T: Real>(&self) -> T {
        let m = T::from_u32(self.order).unwrap();
        (m - T::one()) / m
    }
}

impl std::fmt::Display for Constellation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.modulation {
            Modulation::Psk => write!(f, "{}-PSK", self.order),
            Modulation::Qam => write!(f, "{}-QAM", self.order),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_follows_counts() {
        assert_eq!(SelectionConfig::new(2, 2, 2, 2).unwrap().mode(), SelectionMode::None);
        assert_eq!(SelectionConfig::new(3, 2, 1, 2).unwrap().mode(), SelectionMode::TxOnly);
        assert_eq!(SelectionConfig::new(2, 4, 2, 1).unwrap().mode(), SelectionMode::RxOnly);
        assert_eq!(SelectionConfig::new(4, 4, 2, 2).unwrap().mode(), SelectionMode::Joint);
        assert!(SelectionConfig::with_mode(2, 2, 2, 2, SelectionMode::Joint).is_err());
        assert!(SelectionConfig::with_mode(4, 4, 2, 2, SelectionMode::Joint).is_ok());
    }

    #[test]
    fn bad_counts() {
        assert!(SelectionConfig::new(0, 1, 1, 1).is_err());
        assert!(SelectionConfig::new(2, 2, 3, 1).is_err());
        assert!(SelectionConfig::new(2, 2, 1, 0).is_err());
    }

    #[test]
    fn enumerates_configs() {
        // 10 (K, K_s) pairs times 10 (N, N_s) pairs.
        assert_eq!(SelectionConfig::all_up_to(4, 4).len(), 100);
    }

    #[test]
    fn constellation_constants() {
        let c = Constellation::qam(16).unwrap();
        assert_eq!(c.bits_per_symbol(), 4);
        assert_eq!(c.side(), 4);
        assert!((c.q::<f64>() - 0.75).abs() < 1e-15);
        assert!((c.g_factor::<f64>() - 0.1).abs() < 1e-15);
        let p = Constellation::psk(2).unwrap();
        assert!((p.g_factor::<f64>() - 1.0).abs() < 1e-15);
        assert!(Constellation::qam(8).is_err());
        assert!(Constellation::psk(6).is_err());
        assert!(Constellation::qam(2).is_err());
    }
}
