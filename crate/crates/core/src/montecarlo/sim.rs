use num_complex::Complex64;

use super::channel::{select_antennas, ChannelRealization};
use super::link::Link;
use super::modem::Modem;
use super::parallel::run_chunked;
use super::rng::{substream, GaussianSource, Purpose};
use crate::analytic::{Constellation, SelectionConfig};
use crate::error::{Error, Result};

const CHUNK_SYMBOLS: u64 = 4096;
const CHUNK_DRAWS: u64 = 8192;

/// Space-time code used by the simulated link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Code {
    /// Rate-1 Alamouti code, requires exactly two selected transmit antennas.
    AlamoutiG2,
    /// One transmit antenna, maximal-ratio combining at the receiver.
    UncodedSingle,
    /// Any orthogonal code of the given rate, simulated only through its
    /// equivalent scalar channel with SNR `(μR/N_s)·Θ`.
    Equivalent { rate: f64 },
}

impl Code {
    pub fn rate(&self) -> f64 {
        match *self {
            Code::AlamoutiG2 | Code::UncodedSingle => 1.0,
            Code::Equivalent { rate } => rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub selection: SelectionConfig,
    pub constellation: Constellation,
    pub code: Code,
    /// Average SNR per receive antenna in dB; `-inf` means zero SNR.
    pub mu_db: f64,
    pub min_symbols: u64,
    pub min_errors: u64,
    /// Hard cap on simulated symbols.
    pub max_symbols: u64,
    pub seed: u64,
    /// Worker threads (0 = all available). Does not affect results.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(
        selection: SelectionConfig,
        constellation: Constellation,
        code: Code,
        mu_db: f64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            selection,
            constellation,
            code,
            mu_db,
            min_symbols: 100_000,
            min_errors: 200,
            max_symbols: 100_000_000,
            seed,
            workers: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_symbols < 1_000 {
            return Err(Error::Config(format!("min_symbols must be at least 1000, got {}", self.min_symbols)));
        }
        if self.min_errors == 0 {
            return Err(Error::Config("min_errors must be positive".into()));
        }
        if self.mu_db.is_nan() || self.mu_db == f64::INFINITY {
            return Err(Error::Config(format!("invalid SNR {} dB", self.mu_db)));
        }
        match self.code {
            Code::AlamoutiG2 if self.selection.k_s() != 2 => {
                Err(Error::Config(format!("Alamouti needs K_s = 2, got K_s = {}", self.selection.k_s())))
            }
            Code::UncodedSingle if self.selection.k_s() != 1 => {
                Err(Error::Config(format!("uncoded transmission needs K_s = 1, got K_s = {}", self.selection.k_s())))
            }
            Code::Equivalent { rate } if !(rate > 0.0 && rate.is_finite()) => {
                Err(Error::Config(format!("code rate must be positive, got {rate}")))
            }
            _ => Ok(()),
        }
    }

    /// Linear average SNR per receive antenna.
    pub fn mu(&self) -> f64 {
        10f64.powf(self.mu_db / 10.0)
    }
}

/// Error counts and rate estimates from one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub symbols: u64,
    pub symbol_errors: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ser: f64,
    pub ber: f64,
    pub ser_stderr: f64,
    pub ber_stderr: f64,
    /// Channel realizations drawn.
    pub wall_trials: u64,
    /// The symbol cap was hit before `min_errors` errors were seen.
    pub low_confidence: bool,
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    symbols: u64,
    symbol_errors: u64,
    bits: u64,
    bit_errors: u64,
    trials: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.symbols += o.symbols;
        self.symbol_errors += o.symbol_errors;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.trials += o.trials;
    }

    fn finish(self, low_confidence: bool) -> SimResult {
        let rate = |e: u64, n: u64| if n == 0 { 0.0 } else { e as f64 / n as f64 };
        let se = |p: f64, n: u64| if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() };
        let ser = rate(self.symbol_errors, self.symbols);
        let ber = rate(self.bit_errors, self.bits);
        SimResult {
            symbols: self.symbols,
            symbol_errors: self.symbol_errors,
            bits: self.bits,
            bit_errors: self.bit_errors,
            ser,
            ber,
            ser_stderr: se(ser, self.symbols),
            ber_stderr: se(ber, self.bits),
            wall_trials: self.trials,
            low_confidence,
        }
    }
}

fn drive(cfg: &SimConfig, chunk: impl Fn(u64) -> Counts + Sync) -> SimResult {
    let mut total = Counts::default();
    let mut low = false;
    let first = cfg.min_symbols.div_ceil(CHUNK_SYMBOLS) as usize;
    run_chunked(cfg.workers, first, chunk, |c| {
        total.add(&c);
        if total.symbols >= cfg.min_symbols && total.symbol_errors >= cfg.min_errors {
            return true;
        }
        if total.symbols >= cfg.max_symbols {
            low = true;
            return true;
        }
        false
    });
    total.finish(low)
}

/// Full matrix-level simulation: channel draw, antenna selection, space-time
/// encoding, noisy reception, combining and detection. Codes without a
/// matrix model fall back to [`run_fast_equivalent_sim`].
pub fn run_ser_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if let Code::Equivalent { .. } = cfg.code {
        return run_fast_equivalent_sim(cfg);
    }
    let sel_cfg = cfg.selection;
    let link = Link::new(Modem::new(cfg.constellation), cfg.code, cfg.mu(), sel_cfg.n_s());
    let bits_per = u64::from(cfg.constellation.bits_per_symbol());
    let m = cfg.constellation.order() as usize;
    let tau = link.block_symbols();
    Ok(drive(cfg, |index| {
        let mut src = GaussianSource::new(substream(cfg.seed, Purpose::SymbolErrors, index));
        let mut ch = ChannelRealization::zeros(sel_cfg.k(), sel_cfg.n());
        let mut counts = Counts::default();
        let mut symbols = vec![0usize; tau];
        while counts.symbols < CHUNK_SYMBOLS {
            ch.resample(&mut src);
            let sel = select_antennas(&ch, sel_cfg.k_s(), sel_cfg.n_s());
            for s in symbols.iter_mut() {
                *s = src.uniform_index(m);
            }
            let detected = link.transmit_and_detect(&ch, &sel, &symbols, &mut src);
            for (&s, &d) in symbols.iter().zip(&detected) {
                counts.symbols += 1;
                counts.bits += bits_per;
                if s != d {
                    counts.symbol_errors += 1;
                    counts.bit_errors += u64::from(link.modem().bit_errors(s, d));
                }
            }
            counts.trials += 1;
        }
        counts
    }))
}

/// Equivalent scalar-channel simulation: each symbol sees
/// `y = √γ·x + n` with `γ = (μR/N_s)·Θ` for a freshly drawn Θ.
pub fn run_fast_equivalent_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let sel_cfg = cfg.selection;
    let modem = Modem::new(cfg.constellation);
    let snr_per_theta = cfg.mu() * cfg.code.rate() / sel_cfg.n_s() as f64;
    let bits_per = u64::from(cfg.constellation.bits_per_symbol());
    let m = modem.order();
    Ok(drive(cfg, |index| {
        let mut src = GaussianSource::new(substream(cfg.seed, Purpose::FastSymbolErrors, index));
        let mut ch = ChannelRealization::zeros(sel_cfg.k(), sel_cfg.n());
        let mut counts = Counts::default();
        while counts.symbols < CHUNK_SYMBOLS {
            ch.resample(&mut src);
            let theta = select_antennas(&ch, sel_cfg.k_s(), sel_cfg.n_s()).theta;
            let gain = (snr_per_theta * theta).sqrt();
            let s = src.uniform_index(m);
            let y: Complex64 = modem.point(s) * gain + src.complex_unit();
            let d = modem.detect(y, gain);
            counts.symbols += 1;
            counts.bits += bits_per;
            counts.trials += 1;
            if s != d {
                counts.symbol_errors += 1;
                counts.bit_errors += u64::from(modem.bit_errors(s, d));
            }
        }
        counts
    }))
}

fn theta_chunk(cfg: &SelectionConfig, seed: u64, index: u64, count: u64, mut visit: impl FnMut(f64)) {
    let mut src = GaussianSource::new(substream(seed, Purpose::Theta, index));
    let mut ch = ChannelRealization::zeros(cfg.k(), cfg.n());
    for _ in 0..count {
        ch.resample(&mut src);
        visit(select_antennas(&ch, cfg.k_s(), cfg.n_s()).theta);
    }
}

fn chunk_len(total: u64, index: u64) -> u64 {
    total.saturating_sub(index * CHUNK_DRAWS).min(CHUNK_DRAWS)
}

/// `count` independent draws of Θ with selection applied, in a fixed order.
pub fn sample_theta(cfg: &SelectionConfig, count: u64, seed: u64, workers: usize) -> Vec<f64> {
    let chunks = count.div_ceil(CHUNK_DRAWS);
    let mut out = Vec::with_capacity(count as usize);
    let mut absorbed = 0;
    if chunks == 0 {
        return out;
    }
    run_chunked(
        workers,
        chunks as usize,
        |i| {
            let mut v = Vec::with_capacity(CHUNK_DRAWS as usize);
            theta_chunk(cfg, seed, i, chunk_len(count, i), |t| v.push(t));
            v
        },
        |v| {
            out.extend(v);
            absorbed += 1;
            absorbed == chunks
        },
    );
    out
}

/// Sample means and standard errors of `e^{-sΘ}` for each `s`, all from the
/// same `trials` draws of Θ.
pub fn estimate_mgf_many(
    cfg: &SelectionConfig,
    s_values: &[f64],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<(f64, f64)>> {
    if s_values.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::Domain("MGF argument must be non-negative".into()));
    }
    if trials < 2 {
        return Err(Error::Config("need at least two trials".into()));
    }
    let chunks = trials.div_ceil(CHUNK_DRAWS);
    let k = s_values.len();
    let mut sum = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    let mut absorbed = 0;
    run_chunked(
        workers,
        chunks as usize,
        |i| {
            let mut s1 = vec![0.0; k];
            let mut s2 = vec![0.0; k];
            theta_chunk(cfg, seed, i, chunk_len(trials, i), |t| {
                for (j, &s) in s_values.iter().enumerate() {
                    let v = (-s * t).exp();
                    s1[j] += v;
                    s2[j] += v * v;
                }
            });
            (s1, s2)
        },
        |(s1, s2)| {
            for j in 0..k {
                sum[j] += s1[j];
                sum_sq[j] += s2[j];
            }
            absorbed += 1;
            absorbed == chunks
        },
    );
    let n = trials as f64;
    Ok(s_values
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            if s == 0.0 {
                return (1.0, 0.0);
            }
            let mean = sum[j] / n;
            let var = ((sum_sq[j] - n * mean * mean) / (n - 1.0)).max(0.0);
            (mean, (var / n).sqrt())
        })
        .collect())
}

/// Empirical `E{e^{-sΘ}}` and its standard error.
pub fn estimate_mgf(cfg: &SelectionConfig, s: f64, trials: u64, seed: u64) -> Result<(f64, f64)> {
    if trials < 10_000 {
        return Err(Error::Config(format!("estimate_mgf needs at least 10^4 trials, got {trials}")));
    }
    Ok(estimate_mgf_many(cfg, &[s], trials, seed, 0)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alamouti_8psk(mu_db: f64) -> SimConfig {
        SimConfig::new(
            SelectionConfig::full(2, 2).unwrap(),
            Constellation::psk(8).unwrap(),
            Code::AlamoutiG2,
            mu_db,
            42,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let sel = SelectionConfig::new(3, 2, 1, 2).unwrap();
        let psk = Constellation::psk(4).unwrap();
        assert!(SimConfig::new(sel, psk, Code::AlamoutiG2, 0.0, 1).is_err());
        assert!(SimConfig::new(sel, psk, Code::UncodedSingle, 0.0, 1).is_ok());
        assert!(SimConfig::new(sel, psk, Code::Equivalent { rate: 0.0 }, 0.0, 1).is_err());
        let mut cfg = alamouti_8psk(0.0);
        cfg.min_symbols = 10;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_snr_gives_uniform_errors() {
        let mut cfg = alamouti_8psk(f64::NEG_INFINITY);
        cfg.min_symbols = 200_000;
        let r = run_ser_sim(&cfg).unwrap();
        assert!((r.ser - 0.875).abs() < 3.0 * r.ser_stderr, "{r:?}");
        let f = run_fast_equivalent_sim(&cfg).unwrap();
        assert!((f.ser - 0.875).abs() < 3.0 * f.ser_stderr, "{f:?}");
    }

    #[test]
    fn counts_are_consistent() {
        let r = run_ser_sim(&alamouti_8psk(10.0)).unwrap();
        assert_eq!(r.bits, 3 * r.symbols);
        assert_eq!(r.ser, r.symbol_errors as f64 / r.symbols as f64);
        assert!((r.ser_stderr - (r.ser * (1.0 - r.ser) / r.symbols as f64).sqrt()).abs() < 1e-18);
        assert!(r.bit_errors >= r.symbol_errors && r.bit_errors <= 3 * r.symbol_errors);
        assert_eq!(r.wall_trials * 2, r.symbols);
        assert!(r.symbols >= 100_000 && r.symbol_errors >= 200);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let mut a = alamouti_8psk(12.0);
        a.workers = 1;
        let mut b = a.clone();
        b.workers = 3;
        assert_eq!(run_ser_sim(&a).unwrap(), run_ser_sim(&b).unwrap());
        assert_eq!(run_fast_equivalent_sim(&a).unwrap(), run_fast_equivalent_sim(&b).unwrap());
        let sel = SelectionConfig::new(3, 3, 2, 1).unwrap();
        assert_eq!(sample_theta(&sel, 20_000, 9, 1), sample_theta(&sel, 20_000, 9, 4));
    }

    #[test]
    fn trial_cap_flags_low_confidence() {
        let mut cfg = alamouti_8psk(40.0);
        cfg.min_symbols = 5_000;
        cfg.max_symbols = 8_000;
        let r = run_ser_sim(&cfg).unwrap();
        assert!(r.low_confidence);
        assert!(r.symbols >= 8_000);
    }

    #[test]
    fn mgf_estimate_at_zero_is_exact() {
        let sel = SelectionConfig::full(1, 1).unwrap();
        assert_eq!(estimate_mgf(&sel, 0.0, 10_000, 1).unwrap(), (1.0, 0.0));
        assert!(estimate_mgf(&sel, 1.0, 100, 1).is_err());
        assert!(estimate_mgf(&sel, -1.0, 10_000, 1).is_err());
    }

    #[test]
    fn sample_theta_length() {
        let sel = SelectionConfig::full(1, 2).unwrap();
        assert_eq!(sample_theta(&sel, 10_001, 3, 2).len(), 10_001);
        assert!(sample_theta(&sel, 0, 3, 2).is_empty());
    }
}
