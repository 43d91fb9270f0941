use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ers::cli::{cmd_simulate, cmd_verify, cmd_z0, RunConfig};
use ers::verify::{SignChoice, Suite, VerifyOptions, WConvention};
use ers::{Error, Result};

#[derive(Parser)]
#[command(name = "ers", about = "Elliptic Ruijsenaars-Schneider simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a system described by a JSON config ("-" reads stdin).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run verification suites, comma separated, or "all".
    Verify {
        #[arg(long, default_value = "all")]
        suites: String,
        #[arg(long)]
        seed: Option<u64>,
        /// auto, printed or flipped
        #[arg(long, default_value = "auto")]
        sign: String,
        /// odd_combination or two_v_tilde
        #[arg(long, default_value = "odd_combination")]
        w_convention: String,
        /// Replace a check tolerance, as name=value; repeatable.
        #[arg(long = "tolerance")]
        tolerances: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Solve the N = 2 chart: z0 from f3, or f3 from z0.
    Z0 {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| Error::Config(format!("unknown {what} '{s}'")))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { config, out } => {
            let summary = cmd_simulate(&RunConfig::load(&config)?, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Command::Verify {
            suites,
            seed,
            sign,
            w_convention,
            tolerances,
            out,
        } => {
            let mut overrides = BTreeMap::new();
            for t in &tolerances {
                let (name, value) = t
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("tolerance '{t}' is not name=value")))?;
                let value: f64 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("tolerance '{t}' has no numeric value")))?;
                overrides.insert(name.to_string(), value);
            }
            let opts = VerifyOptions {
                seed,
                sign: parse_enum::<SignChoice>("sign", &sign)?,
                w_convention: parse_enum::<WConvention>("W convention", &w_convention)?,
                tolerance_overrides: overrides,
            };
            let reports = cmd_verify(&Suite::parse_list(&suites)?, &opts, Some(&out))?;
            for r in &reports {
                eprintln!(
                    "{:<20} {} max residual {:.3e} (tolerance {:.1e})",
                    r.suite,
                    if r.pass { "pass" } else { "FAIL" },
                    r.max_residual,
                    r.tolerance
                );
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Z0 { config } => {
            let out = cmd_z0(&RunConfig::load(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
