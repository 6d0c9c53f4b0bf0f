//! `key = value` config files, expanded into flags ahead of the command line
//! so explicit flags win.

use std::fs;

/// Reads a config file into `--key value` pairs. Blank lines and lines
/// starting with `#` are ignored; `key = true` becomes a bare `--key` and
/// `key = false` is dropped.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", no + 1));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

/// Removes `--config PATH` (or `--config=PATH`) from `args` and splices the
/// file's flags in right after the subcommand name.
pub fn expand_config(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let injected = parse_config(&text)?;
    let at = rest.iter().position(|a| subcommands.contains(&a.as_str())).ok_or("--config needs a subcommand")?;
    rest.splice(at + 1..at + 1, injected);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_booleans() {
        let got = parse_config("# c\nM = 8\n\nquick = true\nfoo=false\nsnr-db-range = -5:5:5\n").unwrap();
        assert_eq!(got, ["--M", "8", "--quick", "--snr-db-range", "-5:5:5"]);
        assert!(parse_config("novalue\n").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        fs::write(&p, "K = 3\n").unwrap();
        let args: Vec<String> =
            ["bin", "--config", p.to_str().unwrap(), "ser", "--K", "2"].iter().map(|s| s.to_string()).collect();
        let got = expand_config(args, &["ser"]).unwrap();
        assert_eq!(got, ["bin", "ser", "--K", "3", "--K", "2"]);
    }
}
