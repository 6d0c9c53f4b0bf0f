//! Subcommand implementations.

use std::fmt::Debug;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use ostbc_relay::analytic::{ber_gray_approx, ser_exact, MgfTermSum};
use ostbc_relay::analytic::{product_pdf, product_survival};
use ostbc_relay::capacity::{capacity_table, ergodic_capacity_mc_with, CapacityParams};
use ostbc_relay::montecarlo::{estimate_mgf_many, run_ser_sim, sample_theta, Code, SimConfig};
use ostbc_relay::stats::log_grid;
use ostbc_relay::validation::{run_selected, ValidationOptions};
use ostbc_relay::{Constellation, Error, Modulation, SelectionConfig};

use crate::output::{emit, num, opt, parse_int_range, parse_list, parse_real_range, Csv, Manifest};
use crate::{
    CapacityArgs, Command, GridKind, Method, MgfArgs, ModArg, PdfArgs, SelectionArgs, SerArgs, TableArgs, ValidateArgs,
    EXIT_ACCURACY, EXIT_USAGE, EXIT_VALIDATION,
};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Config(_) => EXIT_USAGE,
            Error::Range(_) | Error::Accuracy { .. } => EXIT_ACCURACY,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        usage(format!("i/o: {e}"))
    }
}

type CmdResult = Result<ExitCode, CliError>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Ser(a) => cmd_ser(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::CapacityTable(a) => cmd_capacity_table(&a),
        Command::ErgodicCapacity(a) => cmd_ergodic_capacity(&a),
        Command::Pdf(a) => cmd_pdf(&a),
        Command::Mgf(a) => cmd_mgf(&a),
    }
}

fn selection(s: &SelectionArgs) -> Result<SelectionConfig, CliError> {
    SelectionConfig::new(s.k, s.n, s.k_s.unwrap_or(s.k), s.n_s.unwrap_or(s.n)).map_err(|e| usage(e.to_string()))
}

/// Writes the CSV and, for file output, its manifest.
fn finish(
    name: &str,
    args: &impl Debug,
    seed: Option<u64>,
    out: Option<&Path>,
    csv: &str,
    extra: Vec<PathBuf>,
    start: Instant,
) -> CmdResult {
    emit(out, csv)?;
    if let Some(path) = out {
        let mut outputs = vec![path.to_path_buf()];
        outputs.extend(extra);
        let manifest =
            Manifest { command: name, parameters: format!("{args:?}"), seed, wall_time: start.elapsed(), outputs };
        manifest.write()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sim_code(a: &SerArgs, sel: &SelectionConfig) -> Code {
    if a.fast || a.rate != 1.0 {
        Code::Equivalent { rate: a.rate }
    } else if sel.k_s() == 2 {
        Code::AlamoutiG2
    } else if sel.k_s() == 1 {
        Code::UncodedSingle
    } else {
        Code::Equivalent { rate: a.rate }
    }
}

fn cmd_ser(a: &SerArgs) -> CmdResult {
    let start = Instant::now();
    let sel = selection(&a.selection)?;
    let modulation = match a.modulation {
        ModArg::Psk => Modulation::Psk,
        ModArg::Qam => Modulation::Qam,
    };
    let c = Constellation::new(modulation, a.m).map_err(|e| usage(e.to_string()))?;
    if !(a.rate > 0.0 && a.rate <= 1.0) {
        return Err(usage(format!("--rate must be in (0, 1], got {}", a.rate)));
    }
    let snrs = parse_real_range(&a.snr_db_range).map_err(usage)?;
    let code = sim_code(a, &sel);
    let do_exact = a.method != Method::Sim;
    let do_sim = a.method != Method::Exact;

    let mut csv =
        Csv::new(&["snr_db", "ser_exact", "ser_sim", "ser_sim_stderr", "ber_approx", "ber_sim", "ber_sim_stderr"]);
    for (i, &db) in snrs.iter().enumerate() {
        let mu = 10f64.powf(db / 10.0);
        let (exact, ber_approx) = if do_exact {
            let s: f64 = ser_exact(&c, &sel, mu, a.rate)?;
            (Some(s), Some(ber_gray_approx(s, &c)?))
        } else {
            (None, None)
        };
        let sim = if do_sim {
            let mut cfg = SimConfig::new(sel, c, code, db, a.run.seed.wrapping_add(i as u64))?;
            cfg.min_symbols = a.min_symbols;
            cfg.min_errors = a.min_errors;
            cfg.max_symbols = a.max_symbols;
            cfg.workers = a.run.workers;
            cfg.validate()?;
            let r = run_ser_sim(&cfg)?;
            if r.low_confidence {
                eprintln!("warning: {db} dB stopped at the symbol cap with {} errors", r.symbol_errors);
            }
            Some(r)
        } else {
            None
        };
        csv.row(&[
            num(db),
            opt(exact),
            opt(sim.as_ref().map(|r| r.ser)),
            opt(sim.as_ref().map(|r| r.ser_stderr)),
            opt(ber_approx),
            opt(sim.as_ref().map(|r| r.ber)),
            opt(sim.as_ref().map(|r| r.ber_stderr)),
        ]);
    }
    finish("ser", a, Some(a.run.seed), a.run.out.as_deref(), &csv.into_string(), vec![], start)
}

fn cmd_validate(a: &ValidateArgs) -> CmdResult {
    let opts =
        ValidationOptions { quick: a.quick, seed: a.seed, workers: a.workers, tolerance_scale: a.tolerance_scale };
    let ids: Vec<&str> = a.only.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    let report = run_selected(&ids, &opts)?;
    let text = report.render();
    print!("{text}");
    if let Some(path) = &a.out {
        std::fs::write(path, &text)?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
}

fn cmd_capacity_table(a: &TableArgs) -> CmdResult {
    let start = Instant::now();
    let ks = parse_int_range(&a.k_range).map_err(usage)?;
    let ns = parse_int_range(&a.n_range).map_err(usage)?;
    let table = capacity_table(&ks, &ns)?;
    let report = table.discrepancy_report();
    let report_path = a.report.clone().or_else(|| {
        a.out.as_ref().map(|o| {
            let mut p = o.clone().into_os_string();
            p.push(".discrepancies.txt");
            PathBuf::from(p)
        })
    });
    match &report_path {
        Some(p) => std::fs::write(p, &report)?,
        None => eprint!("{report}"),
    }
    finish("capacity-table", a, None, a.out.as_deref(), &table.to_csv(), report_path.into_iter().collect(), start)
}

fn cmd_ergodic_capacity(a: &CapacityArgs) -> CmdResult {
    let start = Instant::now();
    let sel = selection(&a.selection)?;
    let rhos = parse_real_range(&a.rho_db_range).map_err(usage)?;
    let mut csv = Csv::new(&["rho_db", "cap_full_mean", "cap_full_stderr", "cap_sel_mean", "cap_sel_stderr"]);
    for (i, &db) in rhos.iter().enumerate() {
        let rho = 10f64.powf(db / 10.0);
        let seed = a.run.seed.wrapping_add(i as u64);
        let full = CapacityParams::new(rho, sel.k(), sel.n(), sel.k(), sel.n())?;
        let chosen = CapacityParams::new(rho, sel.k(), sel.n(), sel.k_s(), sel.n_s())?;
        let f = ergodic_capacity_mc_with(&full, a.trials, seed, a.run.workers)?;
        let s = ergodic_capacity_mc_with(&chosen, a.trials, seed, a.run.workers)?;
        csv.row(&[num(db), num(f.0), num(f.1), num(s.0), num(s.1)]);
    }
    finish("ergodic-capacity", a, Some(a.run.seed), a.run.out.as_deref(), &csv.into_string(), vec![], start)
}

fn theta_grid(a: &PdfArgs, mean: f64) -> Result<Vec<f64>, CliError> {
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let hi = a.theta_max.unwrap_or(40.0 * mean + 60.0);
    let grid = match a.grid {
        GridKind::Log => {
            let lo = a.theta_min.unwrap_or(1e-12);
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(usage("log grid needs 0 < theta-min < theta-max"));
            }
            log_grid(lo, hi, a.points)
        }
        GridKind::Linear => {
            let lo = a.theta_min.unwrap_or(hi / a.points as f64);
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(usage("linear grid needs 0 < theta-min < theta-max"));
            }
            (0..a.points).map(|i| lo + (hi - lo) * i as f64 / (a.points - 1) as f64).collect()
        }
    };
    Ok(grid)
}

fn cmd_pdf(a: &PdfArgs) -> CmdResult {
    let start = Instant::now();
    let sel = selection(&a.selection)?;
    let (tx, rx) = (sel.tx_pdf::<f64>(), sel.rx_pdf::<f64>());
    let pdf = product_pdf(&tx, &rx);
    let survival = product_survival(&tx, &rx);
    let grid = theta_grid(a, tx.mean() * rx.mean())?;

    let mut extra = Vec::new();
    if let Some(path) = &a.dump_terms {
        let text = format!(
            "# source-side terms: coeff, power, rate\n{}# destination-side terms: coeff, power, rate\n{}# density terms: coeff, power, order, scale\n{}# survival terms: coeff, power, order, scale\n{}",
            tx.dump(),
            rx.dump(),
            pdf.dump(),
            survival.dump()
        );
        std::fs::write(path, text)?;
        extra.push(path.clone());
    }

    let empirical = if a.samples > 0 {
        let mut s = sample_theta(&sel, a.samples, a.run.seed, a.run.workers);
        s.sort_by(f64::total_cmp);
        Some(s)
    } else {
        None
    };
    // Histogram bins run between midpoints of neighbouring grid points.
    let edges: Vec<f64> = {
        let mut e = Vec::with_capacity(grid.len() + 1);
        e.push(grid[0]);
        e.extend(grid.windows(2).map(|w| match a.grid {
            GridKind::Log => (w[0] * w[1]).sqrt(),
            GridKind::Linear => 0.5 * (w[0] + w[1]),
        }));
        e.push(grid[grid.len() - 1]);
        e
    };
    let count_le = |s: &[f64], x: f64| s.partition_point(|&v| v <= x);

    let mut csv = Csv::new(&["theta", "pdf_exact", "cdf_exact", "pdf_empirical", "cdf_empirical"]);
    for (i, &x) in grid.iter().enumerate() {
        let p = pdf.eval(x)?;
        let c = (1.0 - survival.eval(x)?).clamp(0.0, 1.0);
        let (pe, ce) = match &empirical {
            Some(s) => {
                let n = s.len() as f64;
                let (lo, hi) = (edges[i], edges[i + 1]);
                let inside = (count_le(s, hi) - count_le(s, lo)) as f64;
                let density = if hi > lo { inside / (n * (hi - lo)) } else { 0.0 };
                (Some(density), Some(count_le(s, x) as f64 / n))
            }
            None => (None, None),
        };
        csv.row(&[num(x), num(p), num(c), opt(pe), opt(ce)]);
    }
    finish("pdf", a, Some(a.run.seed), a.run.out.as_deref(), &csv.into_string(), extra, start)
}

fn cmd_mgf(a: &MgfArgs) -> CmdResult {
    let start = Instant::now();
    let sel = selection(&a.selection)?;
    let s_values = match &a.s_range {
        Some(r) => parse_real_range(r).map_err(usage)?,
        None => parse_list(&a.s_values).map_err(usage)?,
    };
    if s_values.iter().any(|s| !(*s >= 0.0)) {
        return Err(usage("s values must be non-negative"));
    }
    let closed = MgfTermSum::<f64>::for_config(&sel);
    let mut extra = Vec::new();
    if let Some(path) = &a.dump_terms {
        std::fs::write(path, format!("# coeff, a, b, scale\n{}", closed.dump()))?;
        extra.push(path.clone());
    }
    let empirical = match a.trials {
        0 => None,
        1 => return Err(usage("--trials must be 0 or at least 2")),
        t => Some(estimate_mgf_many(&sel, &s_values, t, a.run.seed, a.run.workers)?),
    };
    let mut csv = Csv::new(&["s", "mgf_exact", "mgf_empirical", "mgf_empirical_stderr"]);
    for (i, &s) in s_values.iter().enumerate() {
        let e = empirical.as_ref().map(|v| v[i]);
        csv.row(&[num(s), num(closed.eval(s)?), opt(e.map(|v| v.0)), opt(e.map(|v| v.1))]);
    }
    finish("mgf", a, Some(a.run.seed), a.run.out.as_deref(), &csv.into_string(), extra, start)
}
