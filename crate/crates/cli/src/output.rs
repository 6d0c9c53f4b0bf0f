//! CSV formatting, grid parsing and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Fixed 12-significant-digit rendering.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" so reruns compare byte for byte.
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Inclusive `start:stop:step` range of reals.
pub fn parse_real_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}' in range '{s}'"));
    let (start, stop, step) = match parts.as_slice() {
        [a] => {
            let v = parse(a)?;
            (v, v, 1.0)
        }
        [a, b, c] => (parse(a)?, parse(b)?, parse(c)?),
        _ => return Err(format!("range '{s}' must be start:stop:step")),
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(format!("range '{s}' needs finite start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range '{s}' has too many points"));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Inclusive `start:stop` (or single value) range of counts.
pub fn parse_int_range(s: &str) -> Result<Vec<usize>, String> {
    let parse = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad count '{p}' in range '{s}'"));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a == 0 || b < a {
        return Err(format!("range '{s}' needs 1 <= start <= stop"));
    }
    Ok((a..=b).collect())
}

/// Comma-separated reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}' in list '{s}'"))).collect()
}

/// Builds a CSV document from a header and rows of preformatted cells.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `text` to `path`, or to stdout when there is no path.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Plain-text record of one run, written next to its output.
pub struct Manifest<'a> {
    pub command: &'a str,
    pub parameters: String,
    pub seed: Option<u64>,
    pub wall_time: Duration,
    pub outputs: Vec<PathBuf>,
}

impl Manifest<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "tool_version = {}", env!("CARGO_PKG_VERSION"));
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed = {seed}");
        }
        let _ = writeln!(out, "wall_time_s = {:.3}", self.wall_time.as_secs_f64());
        for p in &self.outputs {
            let _ = writeln!(out, "output = {}", p.display());
        }
        let _ = writeln!(out, "parameters = {}", self.parameters);
        out
    }

    /// Writes the manifest to `<first output>.manifest`.
    pub fn write(&self) -> io::Result<()> {
        let Some(first) = self.outputs.first() else { return Ok(()) };
        let mut path = first.clone().into_os_string();
        path.push(".manifest");
        fs::write(PathBuf::from(path), self.render())
    }
}
