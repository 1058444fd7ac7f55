//! Flat `key = value` experiment files. Keys are long flag names (with `-`
//! or `_`); `[section]` headers and `#`/`;` comments are ignored. A key may
//! repeat for repeatable flags. File values are spliced into the argument
//! list ahead of the command-line flags, and dropped for any flag the
//! command line sets, so flags always win.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::cli::Cli;

#[derive(Debug)]
pub struct ConfigError(pub String);

pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(['#', ';']) || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError(format!("line {}: empty key", i + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Path given with `--config` anywhere in `argv`.
fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn sets_flag(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == long || s.starts_with(&format!("{long}="))
    })
}

/// `argv` with the values of its `--config` file merged in.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse(&text)?;

    // Splice after the subcommand name; without one, clap reports the usage error.
    let Some(sub_at) = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|i| i + 1) else {
        return Ok(argv);
    };
    let sub_name = argv[sub_at].to_string_lossy().into_owned();
    let command = Cli::command();
    let Some(sub) = command.find_subcommand(&sub_name) else {
        return Ok(argv);
    };
    let user = &argv[sub_at + 1..];

    let mut spliced = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| ConfigError(format!("unknown key {key:?} for {sub_name}")))?;
        if sets_flag(user, &key) {
            continue;
        }
        if arg.get_action().takes_values() {
            spliced.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => spliced.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => return Err(ConfigError(format!("key {key:?} expects true or false, got {value:?}"))),
            }
        }
    }
    let mut out: Vec<OsString> = argv[..=sub_at].to_vec();
    out.extend(spliced);
    out.extend(user.iter().cloned());
    Ok(out)
}
