//! Config-file defaults, applied by splicing flags into argv.
//!
//! Top-level keys are global flags; a `[<subcommand>]` table holds that
//! command's flags. A key is skipped when the same flag is on the command
//! line or its `RADLITE_*` variable is set, so flags beat env beats file.

use std::ffi::OsString;
use std::path::PathBuf;

use toml::{Table, Value};

const VALUED_GLOBALS: [&str; 3] = ["--seed", "--config", "--out"];
const SUBCOMMANDS: [&str; 8] = ["assemble", "infer", "eval", "compare", "severity", "route", "fewshot", "bench"];

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    std::env::var_os("RADLITE_CONFIG").map(PathBuf::from)
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUED_GLOBALS.contains(&a) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return SUBCOMMANDS.contains(&a).then_some(i);
        }
        i += 1;
    }
    None
}

fn scalar(key: &str, v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(n) => Ok(n.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        other => Err(format!("config key `{key}`: unsupported value {other}")),
    }
}

fn push_flag(out: &mut Vec<String>, key: &str, v: &Value) -> Result<(), String> {
    let flag = format!("--{}", key.replace('_', "-"));
    match v {
        Value::Boolean(true) => out.push(flag),
        Value::Boolean(false) => {}
        Value::Array(items) => {
            for item in items {
                out.push(flag.clone());
                out.push(scalar(key, item)?);
            }
        }
        other => {
            out.push(flag);
            out.push(scalar(key, other)?);
        }
    }
    Ok(())
}

fn user_supplied(args: &[String], key: &str) -> bool {
    let flag = format!("--{}", key.replace('_', "-"));
    let env = format!("RADLITE_{}", key.replace('-', "_").to_ascii_uppercase());
    std::env::var_os(env).is_some() || args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

pub fn expand_args(raw: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let args: Vec<String> = match raw.iter().map(|a| a.clone().into_string()).collect() {
        Ok(a) => a,
        Err(_) => return Ok(raw),
    };
    let Some(path) = config_path(&args) else { return Ok(raw) };
    let Some(sub) = subcommand_index(&args) else { return Ok(raw) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("config {}: {e}", path.display()))?;
    let table: Table = text.parse().map_err(|e| format!("config {}: {e}", path.display()))?;

    let mut injected = Vec::new();
    for (key, value) in &table {
        match value {
            Value::Table(section) if key == &args[sub] => {
                for (k, v) in section {
                    if !user_supplied(&args, k) {
                        push_flag(&mut injected, k, v)?;
                    }
                }
            }
            Value::Table(_) => {}
            _ if key == "config" => {}
            _ => {
                if !user_supplied(&args, key) {
                    push_flag(&mut injected, key, value)?;
                }
            }
        }
    }
    let mut out = args;
    out.splice(sub + 1..sub + 1, injected);
    Ok(out.into_iter().map(OsString::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn finds_subcommand_past_global_values() {
        assert_eq!(subcommand_index(&argv(&["radlite", "--seed", "7", "eval"])), Some(3));
        assert_eq!(subcommand_index(&argv(&["radlite", "--help"])), None);
    }

    #[test]
    fn splices_config_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "seed = 9\nout = \"o\"\n[eval]\nresamples = 2000\nno_ci = true\npred = [\"a\", \"b\"]\n[bench]\nwarmup = 4\n").unwrap();
        let raw: Vec<OsString> = ["radlite", "--config", cfg.to_str().unwrap(), "eval", "--out", "mine"]
            .iter()
            .map(OsString::from)
            .collect();
        let out: Vec<String> = expand_args(raw).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        let tail = out[4..].join(" ");
        assert!(tail.contains("--resamples 2000"));
        assert!(tail.contains("--no-ci"));
        assert!(tail.contains("--pred a --pred b"));
        assert!(tail.contains("--seed 9"));
        assert!(!tail.contains("--out o"));
        assert!(!tail.contains("warmup"));
    }
}
