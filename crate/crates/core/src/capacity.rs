//! Antenna-selection capacity: normalized-SNR means, the minimum number of
//! receive antennas that matches the unselected baseline, and ergodic
//! capacity by Monte Carlo.
//!
//! With K_s transmit antennas sharing power equally the normalized SNR is
//! `δ^s = ‖h_s‖²‖g_s‖² / K_s` and the capacity is `log2(1 + ρ·δ^s)` bits per
//! channel use. Without selection `E{δ} = N`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::analytic::SelectionConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{run_chunked, select_antennas, substream, ChannelRealization, GaussianSource, Purpose};
use crate::specfun::{harmonic, harmonic_exact};
use crate::Real;

/// Antenna-count grid rows K = 2..=7 and columns N = 2..=10 as printed in the
/// published table of selected receive antennas.
pub const PUBLISHED_TABLE: [[usize; 9]; 6] = [
    [1, 1, 1, 2, 2, 2, 2, 3, 3],
    [1, 1, 1, 1, 2, 2, 2, 2, 2],
    [1, 1, 1, 1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 1, 1, 1, 1],
];

/// Looks up the published entry for `(k, n)`, if the grid covers it.
pub fn published_entry(k: usize, n: usize) -> Option<usize> {
    if (2..=7).contains(&k) && (2..=10).contains(&n) {
        Some(PUBLISHED_TABLE[k - 2][n - 2])
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityParams {
    /// Linear SNR ρ.
    pub rho: f64,
    pub selection: SelectionConfig,
}

impl CapacityParams {
    pub fn new(rho: f64, k: usize, n: usize, k_s: usize, n_s: usize) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Config(format!("ρ must be finite and non-negative, got {rho}")));
        }
        Ok(Self { rho, selection: SelectionConfig::new(k, n, k_s, n_s)? })
    }
}

/// `log2(1 + ρ·δ^s)` for one channel realization with selection applied.
pub fn instantaneous_capacity(ch: &ChannelRealization, rho: f64, k_s: usize, n_s: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let sel = select_antennas(ch, k_s, n_s);
    (rho * sel.theta / k_s as f64).ln_1p() / std::f64::consts::LN_2
}

/// `E{δ^s}` for a single selected transmit antenna and all receive antennas:
/// `N · H_K`.
pub fn expected_delta_tx_selection<T: Real>(k: usize, n: usize) -> T {
    T::from_count(n) * harmonic::<T>(k)
}

fn check_counts(k: usize, n: usize, n_s: usize) -> Result<()> {
    if k == 0 || n == 0 || n_s == 0 || n_s > n {
        return Err(Error::Domain(format!("need K, N >= 1 and 1 <= N_s <= N (K={k}, N={n}, N_s={n_s})")));
    }
    Ok(())
}

/// Δ(N_s) = H_K · (N_s + N_s Σ_{i=N_s+1..N} 1/i) as an exact rational.
pub fn delta_bar_exact(k: usize, n: usize, n_s: usize) -> Result<BigRational> {
    check_counts(k, n, n_s)?;
    let ns = BigRational::from_integer(BigInt::from(n_s));
    let tail = harmonic_exact(n) - harmonic_exact(n_s);
    Ok(harmonic_exact(k) * (ns.clone() + ns * tail))
}

/// Mean normalized SNR with K_s = 1 and N_s of N receive antennas selected.
pub fn delta_bar<T: Real>(k: usize, n: usize, n_s: usize) -> Result<T> {
    check_counts(k, n, n_s)?;
    let tail: T = ((n_s + 1)..=n).rev().map(|i| T::one() / T::from_count(i)).fold(T::zero(), |a, b| a + b);
    let ns = T::from_count(n_s);
    Ok(harmonic::<T>(k) * (ns + ns * tail))
}

/// Smallest N_s with Δ(N_s) ≥ N, compared exactly.
pub fn min_receive_antennas(k: usize, n: usize) -> Result<usize> {
    check_counts(k, n, 1)?;
    let target = BigRational::from_integer(BigInt::from(n));
    for n_s in 1..=n {
        if delta_bar_exact(k, n, n_s)? >= target {
            return Ok(n_s);
        }
    }
    Ok(n)
}

/// Feedback needed to signal one of K transmit antennas: ⌈log2 K⌉ bits.
pub fn feedback_bits(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        usize::BITS - (k - 1).leading_zeros()
    }
}

/// Grid of [`min_receive_antennas`] values.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTable {
    pub k_values: Vec<usize>,
    pub n_values: Vec<usize>,
    /// `cells[i][j]` belongs to `k_values[i]`, `n_values[j]`.
    pub cells: Vec<Vec<usize>>,
}

/// A computed cell that disagrees with the published table.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub k: usize,
    pub n: usize,
    pub computed: usize,
    pub published: usize,
    pub delta_at_published: f64,
}

pub fn capacity_table(k_values: &[usize], n_values: &[usize]) -> Result<CapacityTable> {
    if k_values.is_empty() || n_values.is_empty() {
        return Err(Error::Domain("capacity table ranges must be non-empty".into()));
    }
    let cells = k_values
        .iter()
        .map(|&k| n_values.iter().map(|&n| min_receive_antennas(k, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityTable { k_values: k_values.to_vec(), n_values: n_values.to_vec(), cells })
}

impl CapacityTable {
    pub fn get(&self, k: usize, n: usize) -> Option<usize> {
        let i = self.k_values.iter().position(|&v| v == k)?;
        let j = self.n_values.iter().position(|&v| v == n)?;
        Some(self.cells[i][j])
    }

    /// Header `tx_antennas,feedback_bits,rx_<N>…`, one row per K.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tx_antennas,feedback_bits");
        for n in &self.n_values {
            let _ = write!(out, ",rx_{n}");
        }
        out.push('\n');
        for (k, row) in self.k_values.iter().zip(&self.cells) {
            let _ = write!(out, "{k},{}", feedback_bits(*k));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn discrepancies(&self) -> Vec<Discrepancy> {
        let mut out = Vec::new();
        for (i, &k) in self.k_values.iter().enumerate() {
            for (j, &n) in self.n_values.iter().enumerate() {
                if let Some(published) = published_entry(k, n) {
                    let computed = self.cells[i][j];
                    if computed != published {
                        let delta_at_published = delta_bar::<f64>(k, n, published).unwrap_or(f64::NAN);
                        out.push(Discrepancy { k, n, computed, published, delta_at_published });
                    }
                }
            }
        }
        out
    }

    /// Plain-text report of every cell that differs from the published table.
    pub fn discrepancy_report(&self) -> String {
        let found = self.discrepancies();
        let mut out = String::new();
        let _ = writeln!(out, "cells differing from the published table: {}", found.len());
        for d in &found {
            let _ = writeln!(
                out,
                "K={} N={}: computed {} published {} (mean normalized SNR with {} selected = {:.6} < {})",
                d.k, d.n, d.computed, d.published, d.published, d.delta_at_published, d.n
            );
        }
        out
    }
}

const CAPACITY_CHUNK: u64 = 4096;

/// Ergodic capacity `E{log2(1 + ρ·δ^s)}` over `trials` channel draws:
/// `(mean, stderr)`. Draws depend only on `(K, N, seed)`, so full and
/// selected configurations with the same arrays share realizations.
pub fn ergodic_capacity_mc(params: &CapacityParams, trials: u64, seed: u64) -> Result<(f64, f64)> {
    ergodic_capacity_mc_with(params, trials, seed, 0)
}

pub fn ergodic_capacity_mc_with(params: &CapacityParams, trials: u64, seed: u64, workers: usize) -> Result<(f64, f64)> {
    if trials < 100 {
        return Err(Error::Config(format!("ergodic capacity needs at least 100 trials, got {trials}")));
    }
    let sel = params.selection;
    if params.rho == 0.0 {
        return Ok((0.0, 0.0));
    }
    let chunks = trials.div_ceil(CAPACITY_CHUNK);
    let (mut s1, mut s2, mut absorbed) = (0.0, 0.0, 0);
    run_chunked(
        workers,
        chunks as usize,
        |i| {
            let count = trials.saturating_sub(i * CAPACITY_CHUNK).min(CAPACITY_CHUNK);
            let mut src = GaussianSource::new(substream(seed, Purpose::Capacity, i));
            let mut ch = ChannelRealization::zeros(sel.k(), sel.n());
            let (mut a, mut b) = (0.0, 0.0);
            for _ in 0..count {
                ch.resample(&mut src);
                let c = instantaneous_capacity(&ch, params.rho, sel.k_s(), sel.n_s());
                a += c;
                b += c * c;
            }
            (a, b)
        },
        |(a, b)| {
            s1 += a;
            s2 += b;
            absorbed += 1;
            absorbed == chunks
        },
    );
    let n = trials as f64;
    let mean = s1 / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Monte Carlo means of δ^s from one shared set of draws with `max_k`
/// source and `max_n` destination antennas (configurations with fewer
/// antennas use the leading entries).
#[derive(Debug, Clone)]
pub struct DeltaSweep {
    pub max_k: usize,
    pub max_n: usize,
    pub draws: u64,
    /// K_s = 1, indexed `[k-1][n-1][n_s-1]`: (mean, stderr).
    pub single_tx: Vec<Vec<Vec<(f64, f64)>>>,
    /// N_s = N, indexed `[k-1][k_s-1][n-1]`: (mean, stderr), for k up to `max_k_tx`.
    pub full_rx: Vec<Vec<Vec<(f64, f64)>>>,
}

struct SweepAcc {
    single: Vec<f64>,
    full: Vec<f64>,
}

pub fn delta_sweep(max_k: usize, max_n: usize, max_k_tx: usize, draws: u64, seed: u64, workers: usize) -> DeltaSweep {
    let n_single = max_k * max_n * max_n;
    let n_full = max_k_tx * max_k_tx * max_n;
    let chunks = draws.div_ceil(CAPACITY_CHUNK);
    let single_idx = |k: usize, n: usize, ns: usize| ((k - 1) * max_n + (n - 1)) * max_n + (ns - 1);
    let full_idx = |k: usize, ks: usize, n: usize| ((k - 1) * max_k_tx + (ks - 1)) * max_n + (n - 1);

    let mut total = SweepAcc { single: vec![0.0; 2 * n_single], full: vec![0.0; 2 * n_full] };
    let mut absorbed = 0;
    run_chunked(
        workers,
        chunks as usize,
        |i| {
            let count = draws.saturating_sub(i * CAPACITY_CHUNK).min(CAPACITY_CHUNK);
            let mut src = GaussianSource::new(substream(seed, Purpose::Capacity, 1 << 40 | i));
            let mut acc = SweepAcc { single: vec![0.0; 2 * n_single], full: vec![0.0; 2 * n_full] };
            let mut hs: Vec<f64> = Vec::with_capacity(max_k);
            let mut gs: Vec<f64> = Vec::with_capacity(max_n);
            // b_top[n-1][ns-1] = sum of the ns largest of the first n gains
            let mut b_top = vec![vec![0.0; max_n]; max_n];
            let mut a_top = vec![vec![0.0; max_k]; max_k];
            for _ in 0..count {
                hs.clear();
                gs.clear();
                for row in a_top.iter_mut() {
                    let v = src.complex_unit().norm_sqr();
                    let pos = hs.partition_point(|&x| x > v);
                    hs.insert(pos, v);
                    let mut run = 0.0;
                    for (slot, x) in row.iter_mut().zip(&hs) {
                        run += x;
                        *slot = run;
                    }
                }
                for row in b_top.iter_mut() {
                    let v = src.complex_unit().norm_sqr();
                    let pos = gs.partition_point(|&x| x > v);
                    gs.insert(pos, v);
                    let mut run = 0.0;
                    for (slot, x) in row.iter_mut().zip(&gs) {
                        run += x;
                        *slot = run;
                    }
                }
                for k in 1..=max_k {
                    let a = a_top[k - 1][0];
                    for n in 1..=max_n {
                        for ns in 1..=n {
                            let d = a * b_top[n - 1][ns - 1];
                            let idx = single_idx(k, n, ns);
                            acc.single[2 * idx] += d;
                            acc.single[2 * idx + 1] += d * d;
                        }
                    }
                }
                for k in 1..=max_k_tx {
                    for ks in 1..=k {
                        let a = a_top[k - 1][ks - 1] / ks as f64;
                        for n in 1..=max_n {
                            let d = a * b_top[n - 1][n - 1];
                            let idx = full_idx(k, ks, n);
                            acc.full[2 * idx] += d;
                            acc.full[2 * idx + 1] += d * d;
                        }
                    }
                }
            }
            acc
        },
        |acc| {
            for (t, a) in total.single.iter_mut().zip(&acc.single) {
                *t += a;
            }
            for (t, a) in total.full.iter_mut().zip(&acc.full) {
                *t += a;
            }
            absorbed += 1;
            absorbed == chunks
        },
    );

    let nd = draws as f64;
    let finish = |v: &[f64], idx: usize| {
        let mean = v[2 * idx] / nd;
        let var = ((v[2 * idx + 1] - nd * mean * mean) / (nd - 1.0)).max(0.0);
        (mean, (var / nd).sqrt())
    };
    let single_tx = (1..=max_k)
        .map(|k| (1..=max_n).map(|n| (1..=n).map(|ns| finish(&total.single, single_idx(k, n, ns))).collect()).collect())
        .collect();
    let full_rx = (1..=max_k_tx)
        .map(|k| (1..=k).map(|ks| (1..=max_n).map(|n| finish(&total.full, full_idx(k, ks, n))).collect()).collect())
        .collect();
    DeltaSweep { max_k, max_n, draws, single_tx, full_rx }
}
