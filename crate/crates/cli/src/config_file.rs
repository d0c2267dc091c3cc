//! Config files: TOML whose keys mirror long flags. Top-level keys apply to
//! every subcommand, a `[name]` table to that subcommand only. Values are
//! spliced in ahead of the command line, so flags given there win.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const SUBCOMMANDS: [&str; 6] = ["generate", "solve", "oracle", "export", "benchmark", "report"];

/// Path given by `--config PATH` or `--config=PATH`, if any.
pub fn find_config(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn push_value(out: &mut Vec<OsString>, flag: &str, value: &toml::Value) -> Result<()> {
    match value {
        toml::Value::Boolean(true) => out.push(flag.into()),
        toml::Value::Boolean(false) => {}
        toml::Value::String(s) => {
            out.push(flag.into());
            out.push(s.into());
        }
        toml::Value::Integer(i) => {
            out.push(flag.into());
            out.push(i.to_string().into());
        }
        toml::Value::Float(f) => {
            out.push(flag.into());
            out.push(f.to_string().into());
        }
        toml::Value::Array(items) => {
            for item in items {
                push_value(out, flag, item)?;
            }
        }
        other => bail!("unsupported value for {flag}: {other}"),
    }
    Ok(())
}

/// Flags from `text` that apply to `subcommand`.
pub fn config_args(text: &str, subcommand: &str) -> Result<Vec<OsString>> {
    let table: toml::Table = text.parse().context("invalid config file")?;
    let mut out = Vec::new();
    let mut section = None;
    for (key, value) in &table {
        if SUBCOMMANDS.contains(&key.as_str()) {
            if key == subcommand {
                section = Some(value.as_table().with_context(|| format!("[{key}] must be a table"))?);
            }
            continue;
        }
        if key == "config" {
            bail!("config files cannot include other config files");
        }
        push_value(&mut out, &format!("--{}", key.replace('_', "-")), value)?;
    }
    if let Some(t) = section {
        for (key, value) in t {
            push_value(&mut out, &format!("--{}", key.replace('_', "-")), value)?;
        }
    }
    Ok(out)
}

/// Rebuilds argv as `prog SUBCOMMAND <config flags> <user flags>`.
pub fn apply(args: Vec<OsString>, path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let Some(pos) = args
        .iter()
        .skip(1)
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map(|p| p + 1)
    else {
        return Ok(args);
    };
    let sub = args[pos].to_string_lossy().into_owned();
    let mut out = vec![args[0].clone(), args[pos].clone()];
    out.extend(config_args(&text, &sub)?);
    out.extend(args[1..pos].iter().cloned());
    out.extend(args[pos + 1..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn finds_config_flag() {
        assert_eq!(find_config(&os(&["x", "solve", "--config", "a.toml"])), Some("a.toml".into()));
        assert_eq!(find_config(&os(&["x", "--config=b.toml", "solve"])), Some("b.toml".into()));
        assert_eq!(find_config(&os(&["x", "solve"])), None);
    }

    #[test]
    fn section_and_top_level_keys() {
        let text = "seed = 4\n[solve]\nsweeps = 64\ncheck_invariants = true\n[report]\nout = 'r.csv'\n";
        let args = config_args(text, "solve").unwrap();
        assert_eq!(args, os(&["--seed", "4", "--check-invariants", "--sweeps", "64"]));
        assert_eq!(config_args(text, "report").unwrap(), os(&["--seed", "4", "--out", "r.csv"]));
    }
}
