//! Flat config file support: every key becomes `--key=value` inserted right
//! after the subcommand name, so anything typed on the command line later
//! overrides it.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Command};
use fbpaug_core::Error;

/// Finds `--config FILE` / `--config=FILE` anywhere in `args`.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn subcommand_position(args: &[OsString], cmd: &Command) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--config" {
            i += 2;
            continue;
        }
        if cmd.find_subcommand(s.as_ref()).is_some() {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn value_to_string(key: &str, v: &toml::Value) -> Result<String, Error> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| value_to_string(key, x))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        other => {
            return Err(Error::Config(format!(
                "key `{key}` has unsupported value type {}",
                other.type_str()
            )))
        }
    })
}

/// Returns `args` with the config file's keys spliced in after the
/// subcommand. Keys that belong to a different subcommand are skipped; keys
/// unknown to every subcommand are an error.
pub fn expand(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>, Error> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {}", path.display(), e.message())))?;
    let Some(pos) = subcommand_position(&args, cmd) else {
        return Ok(args);
    };
    let sub = cmd
        .find_subcommand(args[pos].to_string_lossy().as_ref())
        .expect("position found by name");

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in &table {
        let flag = key.replace('_', "-");
        let arg = sub.get_arguments().find(|a| {
            a.get_long() == Some(flag.as_str())
                || a.get_all_aliases().is_some_and(|al| al.contains(&flag.as_str()))
        });
        let Some(arg) = arg else {
            let known_elsewhere = cmd.get_subcommands().any(|s| {
                s.get_arguments().any(|a| a.get_long() == Some(flag.as_str()))
            });
            if known_elsewhere || flag == "config" {
                continue;
            }
            return Err(Error::Config(format!(
                "{}: unknown key `{key}`",
                path.display()
            )));
        };
        let long = format!("--{}", arg.get_long().expect("config keys map to long flags"));
        match (arg.get_action(), value) {
            (ArgAction::SetTrue, toml::Value::Boolean(true)) => injected.push(long.into()),
            (ArgAction::SetTrue, toml::Value::Boolean(false)) => {}
            (ArgAction::SetTrue, _) => {
                return Err(Error::Config(format!("key `{key}` must be true or false")))
            }
            // `--key=value` keeps negative numbers from reading as flags.
            (_, v) => injected.push(format!("{long}={}", value_to_string(key, v)?).into()),
        }
    }

    let mut out = Vec::with_capacity(args.len() + injected.len());
    out.extend_from_slice(&args[..=pos]);
    out.extend(injected);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
