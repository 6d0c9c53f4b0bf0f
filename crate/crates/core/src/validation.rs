//! Cross-checks between the closed forms, quadrature and simulation.
//!
//! Each check returns a [`CheckResult`]; [`run_validation`] runs the full
//! suite. Every tolerance is multiplied by [`ValidationOptions::tolerance_scale`],
//! which exists so callers can confirm that a tightened suite fails.

use std::fmt::Write as _;

use crate::analytic::{
    ber_gray_approx, cdf_theta, mgf_receive_selection, product_pdf, product_survival, ser_exact, Constellation,
    MgfTermSum, Modulation, SelectionConfig,
};
use crate::capacity::{
    capacity_table, delta_bar, delta_sweep, ergodic_capacity_mc_with, expected_delta_tx_selection, CapacityParams,
    DeltaSweep,
};
use crate::error::Result;
use crate::montecarlo::{
    estimate_mgf_many, run_fast_equivalent_sim, run_ser_sim, sample_theta, substream, Code, GaussianSource, Purpose,
    SimConfig,
};
use crate::stats::{ks_critical, ks_statistic, log_grid, TabulatedCdf};
use crate::terms::gsc_pdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Reduced trial counts (10^5) for a fast pass.
    pub quick: bool,
    pub seed: u64,
    /// Worker threads for simulations; 0 uses every core.
    pub workers: usize,
    pub tolerance_scale: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { quick: false, seed: 20_070_601, workers: 0, tolerance_scale: 1.0 }
    }
}

impl ValidationOptions {
    /// Trial count for statistical checks.
    pub fn trials(&self) -> u64 {
        if self.quick {
            100_000
        } else {
            1_000_000
        }
    }

    fn capacity_draws(&self) -> u64 {
        if self.quick {
            100_000
        } else {
            10_000_000
        }
    }

    fn sub_seed(&self, salt: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub comparisons: usize,
    pub failures: usize,
    /// Worst normalized deviation seen (1.0 is the tolerance edge).
    pub worst: f64,
    pub detail: String,
}

struct Tally {
    id: &'static str,
    comparisons: usize,
    failures: usize,
    worst: f64,
    notes: String,
}

impl Tally {
    fn new(id: &'static str) -> Self {
        Self { id, comparisons: 0, failures: 0, worst: 0.0, notes: String::new() }
    }

    /// Records `|deviation| ≤ tolerance`; `label` is kept for failures.
    fn record(&mut self, label: impl FnOnce() -> String, deviation: f64, tolerance: f64) {
        self.comparisons += 1;
        let ratio = if tolerance > 0.0 {
            deviation.abs() / tolerance
        } else if deviation == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        self.worst = self.worst.max(ratio);
        if ratio > 1.0 {
            self.failures += 1;
            if self.failures <= 5 {
                let _ = write!(self.notes, "; {}: deviation {:.3e} > {:.3e}", label(), deviation.abs(), tolerance);
            }
        }
    }

    fn fail(&mut self, label: String) {
        self.comparisons += 1;
        self.failures += 1;
        self.worst = f64::INFINITY;
        if self.failures <= 5 {
            let _ = write!(self.notes, "; {label}");
        }
    }

    fn finish(self) -> CheckResult {
        let mut detail =
            format!("{} comparisons, {} failed, worst/tol {:.3}", self.comparisons, self.failures, self.worst);
        detail.push_str(&self.notes);
        CheckResult {
            id: self.id,
            passed: self.failures == 0 && self.comparisons > 0,
            comparisons: self.comparisons,
            failures: self.failures,
            worst: self.worst,
            detail,
        }
    }
}

const SNR_POINTS_DB: [f64; 4] = [5.0, 10.0, 15.0, 20.0];

fn sim_config(
    sel: SelectionConfig,
    c: Constellation,
    mu_db: f64,
    symbols: u64,
    seed: u64,
    workers: usize,
) -> Result<SimConfig> {
    let mut cfg = SimConfig::new(sel, c, Code::AlamoutiG2, mu_db, seed)?;
    cfg.min_symbols = symbols;
    cfg.workers = workers;
    Ok(cfg)
}

fn ser_agreement(
    id: &'static str,
    cases: &[SelectionConfig],
    c: Constellation,
    check_ber: bool,
    opts: &ValidationOptions,
    salt: u64,
) -> Result<CheckResult> {
    let mut t = Tally::new(id);
    let kappa = f64::from(c.bits_per_symbol());
    for (ci, sel) in cases.iter().enumerate() {
        for (pi, &db) in SNR_POINTS_DB.iter().enumerate() {
            let seed = opts.sub_seed(salt + 16 * ci as u64 + pi as u64);
            let sim = run_ser_sim(&sim_config(*sel, c, db, opts.trials(), seed, opts.workers)?)?;
            let exact: f64 = ser_exact(&c, sel, 10f64.powf(db / 10.0), 1.0)?;
            t.record(|| format!("{sel} {db} dB SER"), exact - sim.ser, 3.0 * sim.ser_stderr * opts.tolerance_scale);
            if check_ber {
                // Gray labelling: every symbol error costs between 1 and κ bits.
                let lower: f64 = ber_gray_approx(sim.ser, &c)?;
                let ratio = sim.ber / lower;
                let excess = if ratio < 1.0 {
                    1.0 - ratio
                } else if ratio > kappa {
                    ratio - kappa
                } else {
                    0.0
                };
                t.record(|| format!("{sel} {db} dB BER/Gray bound {ratio:.4}"), excess, 1e-12 * opts.tolerance_scale);
            }
        }
    }
    Ok(t.finish())
}

/// 8-PSK over the Alamouti code, K = N = 2, without selection and with
/// joint selection of both antennas at each end.
pub fn check_psk_ser_agreement(opts: &ValidationOptions) -> Result<CheckResult> {
    let cases = [SelectionConfig::full(2, 2)?, SelectionConfig::new(2, 2, 2, 2)?];
    ser_agreement("ser-8psk", &cases, Constellation::psk(8)?, false, opts, 100)
}

/// 8-PSK over the Alamouti code with joint selection of 2 of 4 antennas at
/// each end.
pub fn check_psk_joint_selection(opts: &ValidationOptions) -> Result<CheckResult> {
    let cases = [SelectionConfig::new(4, 4, 2, 2)?];
    ser_agreement("ser-8psk-joint-4x4", &cases, Constellation::psk(8)?, false, opts, 200)
}

/// 16-QAM over the Alamouti code with joint (K=3, N=2) and receive-only
/// (K=2, N=2) selection of 2 transmit and 1 receive antenna.
pub fn check_qam_ser_agreement(opts: &ValidationOptions) -> Result<CheckResult> {
    let cases = [SelectionConfig::new(3, 2, 2, 1)?, SelectionConfig::new(2, 2, 2, 1)?];
    ser_agreement("ser-16qam", &cases, Constellation::qam(16)?, true, opts, 300)
}

/// The equivalent scalar-channel simulator against the matrix-level one.
pub fn check_fast_vs_matrix(opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("fast-vs-matrix");
    let cases = [
        (SelectionConfig::full(2, 2)?, Constellation::psk(8)?),
        (SelectionConfig::new(3, 3, 2, 1)?, Constellation::qam(16)?),
        (SelectionConfig::new(2, 4, 2, 2)?, Constellation::psk(4)?),
    ];
    for (i, (sel, c)) in cases.iter().enumerate() {
        for db in [5.0, 15.0] {
            let seed = opts.sub_seed(400 + 2 * i as u64 + (db > 10.0) as u64);
            let cfg = sim_config(*sel, *c, db, opts.trials(), seed, opts.workers)?;
            let a = run_ser_sim(&cfg)?;
            let b = run_fast_equivalent_sim(&cfg)?;
            let sigma = a.ser_stderr.hypot(b.ser_stderr);
            t.record(|| format!("{sel} {c} {db} dB"), a.ser - b.ser, 3.0 * sigma * opts.tolerance_scale);
        }
    }
    Ok(t.finish())
}

const MGF_S: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// Closed-form MGF against quadrature of the pdf and against the sample
/// mean of `e^{-sΘ}`, for every configuration up to `max_k × max_n`.
pub fn check_mgf_duality(max_k: usize, max_n: usize, opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("mgf-duality");
    let one: f64 = mgf_receive_selection(&SelectionConfig::full(1, 1)?, 1.0)?;
    t.record(|| "1x1 s=1 oracle".into(), one - 0.596_347_362_323_194_1, 1e-6 * opts.tolerance_scale);
    for (i, cfg) in SelectionConfig::all_up_to(max_k, max_n).iter().enumerate() {
        let closed = MgfTermSum::<f64>::for_config(cfg);
        let pdf = product_pdf(&cfg.tx_pdf::<f64>(), &cfg.rx_pdf::<f64>());
        let est = estimate_mgf_many(cfg, &MGF_S, opts.trials(), opts.sub_seed(1000 + i as u64), opts.workers)?;
        for (&s, &(mean, se)) in MGF_S.iter().zip(&est) {
            let m = closed.eval(s)?;
            match pdf.integrate_weighted(|th| (-s * th).exp()) {
                Ok(q) => t.record(|| format!("{cfg} s={s} quadrature"), m - q, 1e-6 * opts.tolerance_scale),
                Err(e) => t.fail(format!("{cfg} s={s} quadrature: {e}")),
            }
            t.record(|| format!("{cfg} s={s} simulation"), m - mean, 3.0 * se * opts.tolerance_scale);
        }
    }
    Ok(t.finish())
}

/// Tabulated closed-form CDF of Θ on a log grid wide enough that the mass
/// outside it is negligible at KS resolution.
pub fn theta_cdf_table(cfg: &SelectionConfig) -> Result<TabulatedCdf> {
    let mean = cfg.tx_pdf::<f64>().mean() * cfg.rx_pdf::<f64>().mean();
    let grid = log_grid(1e-9, 40.0 * mean + 60.0, 3000);
    let survival = product_survival(&cfg.tx_pdf::<f64>(), &cfg.rx_pdf::<f64>());
    let values =
        grid.iter().map(|&x| survival.eval(x).map(|s| (1.0 - s).clamp(0.0, 1.0))).collect::<Result<Vec<_>>>()?;
    Ok(TabulatedCdf::new(grid, values))
}

/// Normalization of the Θ density and a KS test against simulated Θ.
pub fn check_theta_pdf(max_k: usize, max_n: usize, opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("theta-pdf");
    let n = opts.trials();
    let crit = ks_critical(n as usize, 1e-3);
    for (i, cfg) in SelectionConfig::all_up_to(max_k, max_n).iter().enumerate() {
        let pdf = product_pdf(&cfg.tx_pdf::<f64>(), &cfg.rx_pdf::<f64>());
        match pdf.integrate_weighted(|_| 1.0) {
            Ok(mass) => t.record(|| format!("{cfg} mass"), mass - 1.0, 1e-7 * opts.tolerance_scale),
            Err(e) => t.fail(format!("{cfg} mass: {e}")),
        }
        let table = theta_cdf_table(cfg)?;
        let mut samples = sample_theta(cfg, n, opts.sub_seed(2000 + i as u64), opts.workers);
        samples.sort_by(f64::total_cmp);
        let d = ks_statistic(&samples, |x| table.eval(x));
        t.record(|| format!("{cfg} KS"), d, crit * opts.tolerance_scale);
    }
    // Spot-check the tabulation against the direct CDF.
    let cfg = SelectionConfig::new(3, 4, 2, 2)?;
    let table = theta_cdf_table(&cfg)?;
    for x in [0.01, 0.3, 2.0, 9.0] {
        let direct: f64 = cdf_theta(&cfg, x)?;
        t.record(|| format!("{cfg} table at {x}"), table.eval(x) - direct, 1e-4 * opts.tolerance_scale);
    }
    Ok(t.finish())
}

/// Mean of the generalized-selection pdf for every `(N, N_s)` up to
/// `max_n_mean`, and a KS test against sorted exponential samples up to
/// `max_n_ks`.
pub fn check_order_statistics(max_n_mean: usize, max_n_ks: usize, opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("order-statistics");
    for n in 1..=max_n_mean {
        for l in 1..=n {
            let p = gsc_pdf::<f64>(n, l)?;
            let tail: f64 = ((l + 1)..=n).map(|i| 1.0 / i as f64).sum();
            let want = l as f64 * (1.0 + tail);
            t.record(|| format!("N={n} Ns={l} mean"), p.mean() - want, 1e-9 * opts.tolerance_scale);
            t.record(|| format!("N={n} Ns={l} mass"), p.total_mass() - 1.0, 1e-9 * opts.tolerance_scale);
        }
    }
    let count = opts.trials() as usize;
    let crit = ks_critical(count, 1e-3);
    for n in 1..=max_n_ks {
        let mut src = GaussianSource::new(substream(opts.sub_seed(3000 + n as u64), Purpose::Generic, 0));
        let mut sums = vec![Vec::with_capacity(count); n];
        let mut draw = vec![0.0; n];
        for _ in 0..count {
            for v in draw.iter_mut() {
                *v = src.complex_unit().norm_sqr();
            }
            draw.sort_by(|a, b| b.total_cmp(a));
            let mut run = 0.0;
            for (l, v) in draw.iter().enumerate() {
                run += v;
                sums[l].push(run);
            }
        }
        for (l, mut s) in sums.into_iter().enumerate() {
            let p = gsc_pdf::<f64>(n, l + 1)?;
            s.sort_by(f64::total_cmp);
            let d = ks_statistic(&s, |x| p.cdf(x));
            t.record(|| format!("N={n} Ns={} KS", l + 1), d, crit * opts.tolerance_scale);
        }
    }
    Ok(t.finish())
}

/// Shared Monte Carlo sweep of normalized-SNR means (10^7 draws, or 10^5
/// in quick mode) over K ≤ 7, N ≤ 10.
pub fn capacity_sweep(opts: &ValidationOptions) -> DeltaSweep {
    delta_sweep(7, 10, 4, opts.capacity_draws(), opts.sub_seed(4000), opts.workers)
}

/// Closed-form normalized-SNR means against Monte Carlo, 0.5% relative.
pub fn check_capacity_means(sweep: &DeltaSweep, opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("capacity-means");
    let tol = 5e-3 * opts.tolerance_scale;
    for k in 1..=sweep.max_k {
        for n in 1..=sweep.max_n {
            let full = expected_delta_tx_selection::<f64>(k, n);
            let (mc, _) = sweep.single_tx[k - 1][n - 1][n - 1];
            t.record(|| format!("K={k} N={n} tx selection"), mc / full - 1.0, tol);
            for ns in 1..=n {
                let closed = delta_bar::<f64>(k, n, ns)?;
                let (mc, _) = sweep.single_tx[k - 1][n - 1][ns - 1];
                t.record(|| format!("K={k} N={n} Ns={ns} joint"), mc / closed - 1.0, tol);
            }
        }
    }
    Ok(t.finish())
}

/// A single selected transmit antenna maximizes the mean normalized SNR
/// among `K_s ≤ K` (3σ on the difference).
pub fn check_single_antenna_optimality(sweep: &DeltaSweep, opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("single-antenna-optimality");
    for k in 2..=sweep.full_rx.len() {
        for n in 1..=sweep.max_n {
            let best = sweep.full_rx[k - 1][0][n - 1];
            for ks in 2..=k {
                let other = sweep.full_rx[k - 1][ks - 1][n - 1];
                let sigma = best.1.hypot(other.1);
                // A positive shortfall means K_s > 1 beat a single antenna.
                let shortfall = (other.0 - best.0).max(0.0);
                t.record(|| format!("K={k} Ks={ks} N={n}"), shortfall, 3.0 * sigma * opts.tolerance_scale);
            }
        }
    }
    Ok(t.finish())
}

/// The receive-antenna table entries that follow from the closed form.
pub fn check_table_entries(opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("table-entries");
    let ks: Vec<usize> = (2..=7).collect();
    let ns: Vec<usize> = (2..=10).collect();
    let table = capacity_table(&ks, &ns)?;
    for (k, n, want) in [(2, 2, 1), (2, 5, 2), (4, 10, 2), (5, 10, 2), (5, 5, 1)] {
        let got = table.get(k, n).unwrap_or(0);
        t.record(|| format!("K={k} N={n}: {got}"), got as f64 - want as f64, 0.5 * opts.tolerance_scale);
    }
    let flagged = table.discrepancies().iter().any(|d| (d.k, d.n, d.computed, d.published) == (2, 4, 2, 1));
    t.record(|| "K=2 N=4 flagged".into(), if flagged { 0.0 } else { 1.0 }, 0.5 * opts.tolerance_scale);
    Ok(t.finish())
}

/// Ergodic capacity at 10 dB with 1000 realizations: the selected 1×1 of
/// 5×5 and 1×2 of 5×10 stay within half a bit of the full arrays.
pub fn check_selection_capacity(opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("selection-capacity");
    let rho = 10.0;
    for (k, n, ks, ns) in [(5, 5, 1, 1), (5, 10, 1, 2)] {
        let seed = opts.sub_seed(5000 + 100 * k as u64 + n as u64);
        let full = ergodic_capacity_mc_with(&CapacityParams::new(rho, k, n, k, n)?, 1000, seed, opts.workers)?;
        let sel = ergodic_capacity_mc_with(&CapacityParams::new(rho, k, n, ks, ns)?, 1000, seed, opts.workers)?;
        t.record(
            || format!("{ks}x{ns} of {k}x{n}: {:.3} vs {:.3}", sel.0, full.0),
            sel.0 - full.0,
            0.5 * opts.tolerance_scale,
        );
    }
    Ok(t.finish())
}

/// SER at zero SNR equals `(M-1)/M` for every supported order.
pub fn check_zero_snr(opts: &ValidationOptions) -> Result<CheckResult> {
    let mut t = Tally::new("zero-snr");
    let cfgs = [SelectionConfig::full(1, 1)?, SelectionConfig::new(4, 3, 2, 1)?];
    for bits in 1..=16u32 {
        for modulation in [Modulation::Psk, Modulation::Qam] {
            let Ok(c) = Constellation::new(modulation, 1 << bits) else { continue };
            let m = f64::from(c.order());
            for cfg in &cfgs {
                let v: f64 = ser_exact(&c, cfg, 0.0, 1.0)?;
                t.record(|| format!("{c} {cfg}"), v - (m - 1.0) / m, 1e-10 * opts.tolerance_scale);
            }
        }
    }
    Ok(t.finish())
}

/// Identifiers accepted by [`run_selected`], in run order.
pub const CHECK_IDS: [&str; 12] = [
    "zero-snr",
    "table-entries",
    "order-statistics",
    "theta-pdf",
    "mgf-duality",
    "fast-vs-matrix",
    "ser-8psk",
    "ser-8psk-joint-4x4",
    "ser-16qam",
    "capacity-means",
    "single-antenna-optimality",
    "selection-capacity",
];

fn run_one(id: &str, opts: &ValidationOptions, sweep: &mut Option<DeltaSweep>) -> Result<CheckResult> {
    match id {
        "zero-snr" => check_zero_snr(opts),
        "table-entries" => check_table_entries(opts),
        "order-statistics" => check_order_statistics(10, 8, opts),
        "theta-pdf" => check_theta_pdf(4, 4, opts),
        "mgf-duality" => check_mgf_duality(4, 4, opts),
        "fast-vs-matrix" => check_fast_vs_matrix(opts),
        "ser-8psk" => check_psk_ser_agreement(opts),
        "ser-8psk-joint-4x4" => check_psk_joint_selection(opts),
        "ser-16qam" => check_qam_ser_agreement(opts),
        "capacity-means" => check_capacity_means(sweep.get_or_insert_with(|| capacity_sweep(opts)), opts),
        "single-antenna-optimality" => {
            check_single_antenna_optimality(sweep.get_or_insert_with(|| capacity_sweep(opts)), opts)
        }
        "selection-capacity" => check_selection_capacity(opts),
        other => Err(crate::Error::Config(format!("unknown check '{other}'"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per check followed by a `summary` line of
    /// `key=value` pairs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.detail);
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
        let _ = writeln!(
            out,
            "summary status={} checks={} passed={} failed={} failed_ids={}",
            if failed.is_empty() { "pass" } else { "fail" },
            self.checks.len(),
            self.checks.len() - failed.len(),
            failed.len(),
            if failed.is_empty() { "-".to_string() } else { failed.join(",") }
        );
        out
    }
}

/// Runs the named checks in the given order; an empty list runs them all.
pub fn run_selected(ids: &[&str], opts: &ValidationOptions) -> Result<ValidationReport> {
    let ids: Vec<&str> = if ids.is_empty() { CHECK_IDS.to_vec() } else { ids.to_vec() };
    if let Some(bad) = ids.iter().find(|id| !CHECK_IDS.contains(id)) {
        return Err(crate::Error::Config(format!("unknown check '{bad}'")));
    }
    let mut sweep = None;
    let checks = ids.iter().map(|id| run_one(id, opts, &mut sweep)).collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport { checks })
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    run_selected(&[], opts)
}
