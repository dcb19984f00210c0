use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zaklat_cli::verify::{self, Level};
use zaklat_cli::{commands, CliError, RunConfig};

/// Zak-domain analysis of Gabor systems on rational-density lattices.
///
/// Any `--section.key=value` flag overrides the matching key of the JSON
/// config (e.g. `--grid.cell_res=33`).
#[derive(Parser)]
#[command(name = "zaklat", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run config; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ZAKLAT_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Riesz/frame classification with spectral diagnostics (JSON).
    Classify,
    /// Distances of shifted windows to the Gabor space (CSV + bounds JSON).
    DistScan,
    /// Empirical lower and upper distance constants (JSON).
    Bounds,
    /// Canonical dual or tight window (CSV samples or JSON summary).
    Dual,
    /// Zak transform of the window (CSV field or JSON summary).
    Zak,
    /// Off-band energy loss under channel shifts.
    Ofdm,
    /// Kernel of an overcomplete system and the invariance it forces.
    DemoKernel,
    /// Run the invariant suite.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: Level,
    },
}

/// Top-level config sections, accepted as overrides without a dot.
const SECTIONS: [&str; 8] = ["window", "lattice", "grid", "scan", "output", "ofdm", "dual", "kernel"];

type Overrides = Vec<(String, String)>;

/// Pulls `--a.b=value` and `--a.b value` out of the argument list; the key
/// must contain a dot or name a config section.
fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--") else {
            rest.push(a);
            continue;
        };
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !key.contains('.') && !SECTIONS.contains(&key.as_str()) {
            rest.push(a);
            continue;
        }
        let value = match value {
            Some(v) => v,
            None => it.next().ok_or_else(|| CliError::Config(format!("--{key} needs a value")))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

fn run() -> Result<(), CliError> {
    let (args, overrides) = split_overrides(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Cmd::Verify { level } = cli.cmd {
        let checks = verify::run(level, cli.seed);
        let failures = checks.iter().filter(|c| !c.passed).count();
        for c in &checks {
            println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        println!("{} checks, {} failed (seed {})", checks.len(), failures, cli.seed);
        return if failures == 0 { Ok(()) } else { Err(CliError::VerifyFailed(failures)) };
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.cmd {
        Cmd::Classify => commands::classify(&cfg),
        Cmd::DistScan => commands::dist_scan_cmd(&cfg),
        Cmd::Bounds => commands::bounds(&cfg),
        Cmd::Dual => commands::dual(&cfg),
        Cmd::Zak => commands::zak(&cfg),
        Cmd::Ofdm => commands::ofdm(&cfg),
        Cmd::DemoKernel => commands::demo_kernel(&cfg),
        Cmd::Verify { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zaklat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
