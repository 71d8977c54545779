//! Command-line harness around `contraction-core`: typed configuration,
//! deterministic execution and checksummed result directories.

// NaN must fail validation guards, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use chrono::Utc;
use clap::{Arg, ArgAction, ArgMatches, Command};

pub use commands::{execute, RunOutput};
pub use config::{Format, RunConfig};
pub use error::{LabError, LabResult};
pub use output::{RunManifest, Written};
pub use table::{Cell, Prov, Table};

/// Default output directory when neither `--out` nor the environment sets one.
pub const DEFAULT_OUT: &str = "runs";
pub const OUT_ENV: &str = "CONTRACTION_LAB_OUT";

fn common_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("config").long("config").value_name("PATH").help("key = value configuration file"))
        .arg(Arg::new("seed").long("seed").value_name("U64").value_parser(clap::value_parser!(u64)).help("base seed [default: 0]"))
        .arg(
            Arg::new("replicates")
                .long("replicates")
                .value_name("N")
                .value_parser(clap::value_parser!(u64))
                .help("replicate count, for subcommands that have one"),
        )
        .arg(Arg::new("out").long("out").value_name("DIR").help(format!("output directory [env: {OUT_ENV}] [default: {DEFAULT_OUT}]")))
        .arg(Arg::new("format").long("format").value_parser(["csv", "json"]).default_value("csv").help("result table format"))
        .arg(Arg::new("workers").long("workers").value_name("N").value_parser(clap::value_parser!(usize)).help("worker threads"))
}

pub fn cli() -> Command {
    let mut root = Command::new("contraction-lab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Posterior contraction experiments for Gaussian process priors")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in config::SUBCOMMANDS {
        let mut cmd = common_args(Command::new(sub.name).about(sub.about));
        // `replicates` is served by the common flag
        for p in sub.params.iter().filter(|p| p.key != "replicates") {
            let help = match p.default {
                Some(d) => format!("{} ({}) [default: {d}]", p.help, p.kind),
                None => format!("{} ({}) [required]", p.help, p.kind),
            };
            cmd = cmd.arg(Arg::new(p.key).long(p.key).value_name("VALUE").action(ArgAction::Set).help(help));
        }
        root = root.subcommand(cmd);
    }
    root
}

fn resolve_config(name: &str, m: &ArgMatches) -> LabResult<RunConfig> {
    let sub = config::subcommand(name)?;
    let mut raw = match m.get_one::<String>("config") {
        Some(path) => config::read_config_file(PathBuf::from(path).as_path())?,
        None => Vec::new(),
    };
    for p in sub.params.iter().filter(|p| p.key != "replicates") {
        if let Some(v) = m.get_one::<String>(p.key) {
            raw.push((p.key.to_string(), v.clone()));
        }
    }
    if let Some(r) = m.get_one::<u64>("replicates") {
        if !sub.params.iter().any(|p| p.key == "replicates") {
            return Err(LabError::usage(format!("subcommand `{name}` has no replicates")));
        }
        raw.push(("replicates".into(), r.to_string()));
    }
    let out = m
        .get_one::<String>("out")
        .cloned()
        .or_else(|| std::env::var(OUT_ENV).ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| DEFAULT_OUT.to_string());
    let format = match m.get_one::<String>("format").map(String::as_str) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let seed = m.get_one::<u64>("seed").copied().unwrap_or(0);
    RunConfig::build(name, &raw, seed, PathBuf::from(out), format, m.get_one::<usize>("workers").copied())
}

/// Executes `cfg` (on a dedicated pool when `workers` is set) and writes the
/// run directory. Numeric failures still produce a diagnostic directory.
pub fn run(cfg: &RunConfig) -> LabResult<Written> {
    let started = Utc::now();
    let result = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| LabError::usage(format!("cannot start {w} workers: {e}")))?
            .install(|| execute(cfg)),
        None => execute(cfg),
    };
    match result {
        Ok(o) => output::write_run(cfg, started, Ok((&o.table, &o.summary))),
        Err(e @ LabError::Numeric(_)) => {
            output::write_run(cfg, started, Err(&e.to_string()))?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

/// Parses arguments, runs, reports, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let outcome = resolve_config(name, sub).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(w) => {
            println!("{}", w.dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
