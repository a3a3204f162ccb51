use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use diskcert::commands::{self, CliError, Outcome, EXIT_USAGE};
use diskcert::config::RunConfig;

#[derive(Parser)]
#[command(name = "diskcert", version, about = "Validated solutions of -Δu = w u³ on the unit disk")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Configuration file with key=value lines.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Overrides one setting, e.g. `--set size=40`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute an approximate solution, its Newton operator and eigenpairs.
    Find {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory.
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Certify existence of a solution near the configured approximation.
    Prove {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Bound the Morse index of a certified solution.
    Morse {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Sample a Zernike file on a polar grid as `x y u` rows.
    Render {
        solution: PathBuf,
        #[arg(long, default_value_t = 41)]
        nr: usize,
        #[arg(long, default_value_t = 96)]
        ntheta: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print a squared Clebsch-Gordan value.
    CgDump {
        #[arg(allow_hyphen_values = true)]
        n1: i64,
        #[arg(allow_hyphen_values = true)]
        m1: i64,
        #[arg(allow_hyphen_values = true)]
        n2: i64,
        #[arg(allow_hyphen_values = true)]
        m2: i64,
        #[arg(allow_hyphen_values = true)]
        n3: i64,
        /// Build (or require) a table of at least this degree.
        #[arg(long)]
        max_n: Option<u32>,
        /// Binary table cache to read or create.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run quick internal consistency checks.
    Selftest,
}

fn load_config(a: &ConfigArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &a.config {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::usage(format!("cannot read {}: {e}", p.display())))?;
        let base = p.parent().unwrap_or(Path::new("."));
        cfg.parse_into(&text, base).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?;
    }
    let cwd = std::env::current_dir().map_err(|e| CliError::usage(format!("no working directory: {e}")))?;
    for s in &a.sets {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{s}`")))?;
        cfg.set(k, v, &cwd).map_err(|e| CliError::usage(e.0))?;
    }
    cfg.validate().map_err(|e| CliError::usage(e.0))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.cmd {
        Cmd::Find { cfg, out } => commands::cmd_find(&load_config(&cfg)?, &out),
        Cmd::Prove { cfg } => commands::cmd_prove(&load_config(&cfg)?),
        Cmd::Morse { cfg } => commands::cmd_morse(&load_config(&cfg)?),
        Cmd::Render { solution, nr, ntheta, out } => commands::cmd_render(&solution, nr, ntheta, out.as_deref()),
        Cmd::CgDump { n1, m1, n2, m2, n3, max_n, cache } => commands::cmd_cg_dump([n1, m1, n2, m2, n3], max_n, cache.as_deref()),
        Cmd::Selftest => commands::cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("diskcert: {e}");
            ExitCode::from(e.code)
        }
    }
}
