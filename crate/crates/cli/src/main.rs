//! `lwt`: command-line driver for lattice audits, rate curves, wiretap simulations and the
//! property suites.
//!
//! Every subcommand reads a flat TOML config (unknown keys are rejected), writes CSV with a
//! fixed header to `--out`, the config's `output` key or standard output, and tags each row
//! with the master seed and a hash of the effective configuration.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lattice_wiretap::report::{self, AuditConfig, RatesConfig, SimulateConfig, VerifyConfig};
use lattice_wiretap::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser, Debug)]
#[command(name = "lwt", version, about = "Lattice wiretap coding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config's `master_seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path (overrides the config's `output`; default standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; affects speed only, never results.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants, dual check and bound margins of one lattice.
    LatticeAudit,
    /// Achievable-rate curves over a Bob SNR grid.
    Rates,
    /// Encode, transmit and decode experiments with secrecy diagnostics per k.
    Simulate,
    /// Runs a property suite; exits with 1 if any check fails.
    Verify {
        /// Suite name (overrides the config's `suite`).
        suite: Option<String>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(String),
    Runtime(String),
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownEntry(_) | Error::InvalidArgument(_) | Error::Nesting { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T, Failure> {
    let path = path.ok_or_else(|| Failure::Config("--config PATH is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// First 16 hex digits of the SHA-256 of the effective configuration as JSON.
fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("configs serialise");
    hex::encode(&Sha256::digest(json.as_bytes())[..8])
}

fn emit<T: Serialize>(rows: &[T], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let file = fs::File::create(p)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
            report::write_csv(rows, io::BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report::write_csv(rows, &mut lock)?;
            lock.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn out_path(cli: &Cli, cfg_out: &Option<String>) -> Option<PathBuf> {
    cli.out
        .clone()
        .or_else(|| cfg_out.as_ref().map(PathBuf::from))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg_path = cli.config.as_deref();
    match &cli.command {
        Command::LatticeAudit => {
            let mut cfg: AuditConfig = load_config(cfg_path)?;
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            let row = report::lattice_audit(&cfg, &config_hash(&cfg))?;
            emit(&[row], out_path(cli, &cfg.output).as_deref())
        }
        Command::Rates => {
            let mut cfg: RatesConfig = load_config(cfg_path)?;
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            let rows = report::rate_curves(&cfg, &config_hash(&cfg))?;
            emit(&rows, out_path(cli, &cfg.output).as_deref())
        }
        Command::Simulate => {
            let mut cfg: SimulateConfig = load_config(cfg_path)?;
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            let rows = report::simulate(&cfg, &config_hash(&cfg))?;
            emit(&rows, out_path(cli, &cfg.output).as_deref())
        }
        Command::Verify { suite } => {
            let mut cfg: VerifyConfig = match cfg_path {
                Some(_) => load_config(cfg_path)?,
                None => VerifyConfig::default(),
            };
            if let Some(s) = suite {
                cfg.suite = s.clone();
            }
            cfg.master_seed = cli.seed.unwrap_or(cfg.master_seed);
            let rows = report::verify_rows(&cfg, &config_hash(&cfg))?;
            emit(&rows, out_path(cli, &cfg.output).as_deref())?;
            match rows.iter().filter(|r| !r.passed).count() {
                0 => Ok(()),
                n => Err(Failure::Verification(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("lwt: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global thread pool is configured once");
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(n)) => {
            eprintln!("lwt: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("lwt: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("lwt: configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
