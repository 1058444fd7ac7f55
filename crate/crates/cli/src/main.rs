mod cli;
mod config;
mod run;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgMatches, CommandFactory, FromArgMatches};
use rwrs_core::harness::{summary, write_reports_csv, Verdict};

use crate::cli::Cli;

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    ExitCode::from(dispatch(std::env::args_os().collect()))
}

/// Runs one command line; returns the process exit code.
fn dispatch(argv: Vec<OsString>) -> u8 {
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(config::ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return USAGE_ERROR;
        }
    };
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return USAGE_ERROR;
        }
    };
    let common = cli.command.common().clone();
    let started = unix_now();

    let outcome = match common.workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| prepare_and_run(&cli, &common.out)),
            Err(e) => Err(rwrs_core::Error::Parameter(format!("cannot start {w} workers: {e}"))),
        },
        None => prepare_and_run(&cli, &common.out),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE_ERROR;
        }
    };

    let mut outputs = outcome.files.clone();
    if !outcome.reports.is_empty() {
        let path = common.out.join("reports.csv");
        let written = fs::File::create(&path)
            .map_err(rwrs_core::Error::from)
            .and_then(|mut f| write_reports_csv(&mut f, &outcome.reports, common.no_runtime));
        if let Err(e) = written {
            eprintln!("error: {e}");
            return USAGE_ERROR;
        }
        outputs.insert(0, path);
        print!("{}", summary(&outcome.reports));
    }
    let code = if outcome.reports.iter().any(|r| r.verdict == Verdict::Fail) { 1 } else { 0 };

    let manifest = manifest(&matches, common.seed, started, code, &outputs);
    if let Err(e) = fs::write(common.out.join("manifest.ini"), manifest) {
        eprintln!("error: cannot write manifest: {e}");
        return USAGE_ERROR;
    }
    for p in &outputs {
        println!("wrote {}", p.display());
    }
    code
}

fn prepare_and_run(cli: &Cli, out: &Path) -> rwrs_core::Result<run::Outcome> {
    fs::create_dir_all(out)?;
    run::execute(&cli.command)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Run record in the same flat format as config files; its `[config]`
/// section is a valid `--config` input that reproduces the run.
fn manifest(matches: &ArgMatches, seed: u64, started: u64, code: u8, outputs: &[std::path::PathBuf]) -> String {
    let mut s = String::new();
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let _ = writeln!(s, "[run]");
    let _ = writeln!(s, "tool = rwrs {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "command = {name}");
    let _ = writeln!(s, "master_seed = {seed}");
    let _ = writeln!(s, "started_unix = {started}");
    let _ = writeln!(s, "finished_unix = {}", unix_now());
    let _ = writeln!(s, "exit_code = {code}");
    let _ = writeln!(s, "\n[config]");
    let command = Cli::command();
    let spec = command.find_subcommand(name).expect("parsed subcommand exists");
    for arg in spec.get_arguments() {
        let (Some(long), id) = (arg.get_long(), arg.get_id().as_str()) else { continue };
        if long == "config" {
            continue;
        }
        if let Some(values) = sub.get_raw(id) {
            for v in values {
                let _ = writeln!(s, "{long} = {}", v.to_string_lossy());
            }
        }
    }
    let _ = writeln!(s, "\n[outputs]");
    for p in outputs {
        let _ = writeln!(s, "{} = {}", p.file_stem().unwrap_or_default().to_string_lossy(), p.display());
    }
    s
}
