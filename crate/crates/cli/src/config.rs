//! `key = value` config files. Each key names a long flag (`_` and `-` are
//! interchangeable) and may repeat for list flags such as `alg`. Keys given on
//! the command line replace every file entry of the same key.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses a config file into `(flag, value)` pairs in file order.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key `{}`", i + 1, key);
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Locates `--config <path>` or `--config=<path>` in raw arguments.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Appends the entries of the config file named by `--config` (if any) to
/// `args`, skipping keys already present on the command line.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let given: HashSet<&str> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split_once('=').map_or(a, |(k, _)| k))
        .collect();
    let extra: Vec<String> = parse(&text)?
        .into_iter()
        .filter(|(k, _)| !given.contains(k.as_str()))
        .flat_map(|(k, v)| [format!("--{k}"), v])
        .collect();
    let mut args = args;
    args.extend(extra);
    Ok(args)
}
