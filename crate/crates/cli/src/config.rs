//! `key = value` config files that mirror the command-line flags.
//!
//! ```text
//! # shared by every subcommand that accepts the flag
//! seed = 7
//! # only for `scan`
//! scan.rho = -0.7:0.7:29
//! ```
//!
//! Each entry becomes `--key value` after the subcommand name unless the flag
//! already appears on the command line, so explicit flags win. `true` turns
//! into a bare switch and `false` drops it.

use std::fs;

pub const SUBCOMMANDS: [&str; 5] = ["scan", "verify", "moment", "wdic", "gen-data"];

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub section: Option<String>,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value, got '{line}'", i + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        let (section, key) = match k.split_once('.') {
            Some((s, key)) => {
                if !SUBCOMMANDS.contains(&s) {
                    return Err(format!("line {}: unknown subcommand '{s}' in key '{k}'", i + 1));
                }
                (Some(s.to_string()), key)
            }
            None => (None, k),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(format!("line {}: invalid key '{k}'", i + 1));
        }
        out.push(Entry { line: i + 1, section, key: key.replace('_', "-"), value: v.to_string() });
    }
    Ok(out)
}

/// Finds `--config FILE` (or `--config=FILE`) and removes it.
fn take_config_path(args: &mut Vec<String>) -> Result<Option<String>, String> {
    for i in 1..args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a file".into());
            }
            let path = args.remove(i + 1);
            args.remove(i);
            return Ok(Some(path));
        }
        if let Some(p) = args[i].strip_prefix("--config=") {
            let p = p.to_string();
            args.remove(i);
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Rewrites `args` with the config entries that apply to the chosen subcommand.
/// Unsectioned keys are skipped where `accepts(subcommand, key)` is false.
pub fn apply(mut args: Vec<String>, accepts: impl Fn(&str, &str) -> bool) -> Result<Vec<String>, String> {
    let Some(path) = take_config_path(&mut args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse(&text).map_err(|e| format!("{path}: {e}"))?;
    let Some(sub) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let present = |key: &str| {
        let flag = format!("--{key}");
        args[sub + 1..].iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for e in entries {
        let wanted = match e.section.as_deref() {
            Some(s) => s == args[sub],
            None => accepts(&args[sub], &e.key),
        };
        if !wanted || present(&e.key) {
            continue;
        }
        match e.value.as_str() {
            "true" => extra.push(format!("--{}", e.key)),
            "false" => {}
            v => extra.push(format!("--{}={v}", e.key)),
        }
    }
    args.splice(sub + 1..sub + 1, extra);
    Ok(args)
}
