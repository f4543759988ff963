use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnls_lab::run::write_rejection_manifest;
use dnls_lab::{parse_config, run, ConfigError};

const COLUMNS: &str = "\
Output: <experiment>-<seed>-<n>-<M>.csv, a .json summary with the same stem,
and manifest.json (config echo, versions, wall time, status). Reals are
written with 17 significant digits.

CSV columns per experiment:
  persistence          t,h2,weighted_r,sup,constraint_residual (one row per
                       slice, M+1 rows; residual empty; last line is
                       `# {summary json}`)
  constraint           t,constraint_residual
  strichartz,
  inhomog-strichartz,
  weighted-semigroup   trial,data_id,n,L,M,time,pairs,lhs,rhs_total,ratio,
                       followed by one column per right-hand-side term
  picard-vs-stepper    iteration,distance
  approx-sequence      level,cutoff,rho,lhs,rhs,ratio
  lipschitz            perturbation,lhs,rhs,ratio
  order                scheme,dt,error

Exit status: 0 all assertions hold, 1 an assertion failed, 2 solver error or
invalid configuration.

Environment: DNLS_LAB_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "dnls-lab", version, about = "Numerical laboratory for the derivative NLS equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config file
    #[command(after_long_help = COLUMNS, after_help = COLUMNS)]
    Run {
        config: PathBuf,
        /// Output directory, overriding `output_dir` from the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Data/ensemble seed, overriding `data.seed`
        #[arg(long)]
        seed: Option<u64>,
        /// Print nothing on success
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and check a config file without running it
    Validate { config: PathBuf },
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DNLS_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DNLS_LAB_THREADS = {raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot build thread pool: {e}"))
}

fn load(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Validate { config } => {
            let checked = load(&config).and_then(|text| parse_config(&text).map_err(|e| e.to_string()));
            match checked {
                Ok(c) => {
                    println!(
                        "{}: ok ({}, n={}, L={}, M={}, dt={:e})",
                        config.display(),
                        c.experiment,
                        c.grid.n,
                        c.grid.box_length,
                        c.time.resolved_steps(),
                        c.time.resolved_dt()
                    );
                    ExitCode::SUCCESS
                }
                Err(msg) => {
                    eprintln!("{}: {msg}", config.display());
                    ExitCode::from(2)
                }
            }
        }
        Command::Run {
            config,
            out,
            seed,
            quiet,
        } => {
            let text = match load(&config) {
                Ok(t) => t,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            let mut cfg = match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    let kind = match e {
                        ConfigError::Parse(_) => "ConfigParse",
                        ConfigError::Invalid { .. } => "ConfigInvalid",
                    };
                    let dir = out.unwrap_or_else(|| PathBuf::from("dnls-out"));
                    if let Err(io) = write_rejection_manifest(&dir, &text, kind, &e.to_string()) {
                        eprintln!("error: cannot write manifest: {io}");
                    }
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                cfg.data.seed = s;
            }
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            match run(&cfg, &dir) {
                Ok(outcome) => {
                    let code = outcome.status.exit_code();
                    if code != 0 {
                        eprintln!("{}: {}", cfg.experiment, outcome.headline);
                    } else if !quiet {
                        println!("{}: {}", cfg.experiment, outcome.headline);
                        for f in &outcome.files {
                            println!("  wrote {}", f.display());
                        }
                    }
                    ExitCode::from(code)
                }
                Err(e) => {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    ExitCode::from(2)
                }
            }
        }
    }
}
