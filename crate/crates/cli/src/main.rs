mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jc_susy::darboux::SlopeRule;
use jc_susy::intertwiners::IntertwinerKind;
use jc_susy::Exec;

use commands::{DarbouxInput, Model};
use config::{Format, Overrides, RunConfig, TOL_ENV};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "jc-susy",
    version,
    about = "Jaynes-Cummings intertwiners, hierarchies and Darboux checks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// key = value file; flags override it
    #[arg(long, short = 'c', global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long = "nmax", alias = "n-max", global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    x_max: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Matrix residual tolerance (default 1e-10, or $JC_SUSY_TOL)
    #[arg(long = "tol", global = true)]
    tol_residual: Option<f64>,
    /// Grid tolerance for the Darboux checks
    #[arg(long, global = true)]
    tol_grid: Option<f64>,
    #[arg(long, short = 'f', global = true, value_enum)]
    format: Option<Format>,
    /// Output file (a directory for `figures`)
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Disable the data-parallel paths
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    Exact,
    Fd,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Physical and nonphysical levels
    Spectrum {
        #[arg(long, value_enum, default_value = "jc")]
        model: Model,
        /// Diagonalize the truncated matrix and reconcile
        #[arg(long)]
        numeric: bool,
    },
    /// One intertwiner and its residuals
    Partners {
        #[arg(long, value_parser = parse_kind)]
        kind: IntertwinerKind,
    },
    /// Detuned sequence with per-step ledgers
    Hierarchy {
        #[arg(long, default_value_t = 1)]
        up: usize,
        #[arg(long, default_value_t = 0)]
        down: usize,
        /// Build the anti-JC chain
        #[arg(long)]
        anti: bool,
    },
    /// Resonant chain H^k, k = 0..k
    Resonant {
        #[arg(long = "k", default_value_t = 9)]
        k_max: usize,
    },
    /// Grid Darboux construction from a kind's seed pair or explicit seeds
    Darboux {
        #[arg(long, value_parser = parse_kind, conflicts_with = "seeds", required_unless_present = "seeds")]
        kind: Option<IntertwinerKind>,
        /// Two seeds, e.g. `phi0,phi1-` or `psi0,psi1+`
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "exact")]
        rule: Rule,
        /// Half-width of the fit and dump window
        #[arg(long, default_value_t = 4.0)]
        window: f64,
        /// Dump every n-th grid point
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Run the full acceptance suite
    Verify,
    /// Figure data files for figures 1, 2, 3 and 8
    Figures {
        /// Figure number; all when omitted
        #[arg(long = "fig")]
        fig: Option<u8>,
        /// Highest physical block index per panel
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
}

fn parse_kind(s: &str) -> Result<IntertwinerKind, String> {
    s.parse().map_err(|e: jc_susy::JcError| e.to_string())
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.delta,
            lambda: self.lambda,
            n_max: self.n_max,
            x_min: self.x_min,
            x_max: self.x_max,
            points: self.points,
            tol_residual: self.tol_residual,
            tol_grid: self.tol_grid,
            format: self.format,
            output: self.output.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let env_tol = std::env::var(TOL_ENV).ok();
    let cfg = RunConfig::resolve(
        cli.common.config.as_deref(),
        env_tol.as_deref(),
        &cli.common.overrides(),
    )?;
    let exec = if cli.common.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    log::debug!("config: {cfg:?}, exec: {exec:?}");
    let report = match cli.cmd {
        Command::Spectrum { model, numeric } => commands::spectrum(&cfg, model, numeric)?,
        Command::Partners { kind } => commands::partners(&cfg, kind, exec)?,
        Command::Hierarchy { up, down, anti } => commands::hierarchy(&cfg, up, down, anti, exec)?,
        Command::Resonant { k_max } => commands::resonant(&cfg, k_max, exec)?,
        Command::Darboux {
            kind,
            seeds,
            rule,
            window,
            stride,
        } => {
            let input = match (kind, seeds) {
                (Some(k), _) => DarbouxInput::Kind(k),
                (None, Some(s)) if s.len() == 2 => {
                    DarbouxInput::Seeds(commands::parse_label(&s[0])?, commands::parse_label(&s[1])?)
                }
                (None, Some(_)) => return Err(CliError::Input("--seeds takes exactly two labels".into())),
                (None, None) => return Err(CliError::Input("give --kind or --seeds".into())),
            };
            let rule = match rule {
                Rule::Exact => SlopeRule::Exact,
                Rule::Fd => SlopeRule::CentralDifference,
            };
            commands::darboux(&cfg, input, rule, window, stride, exec)?
        }
        Command::Verify => commands::verify(&cfg, exec)?,
        Command::Figures { fig, levels } => {
            let ids: Vec<u8> = fig.map_or(commands::FIGURE_IDS.to_vec(), |f| vec![f]);
            let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
            for p in commands::figures(&cfg, &ids, levels, &dir)? {
                println!("{}", p.display());
            }
            return Ok(());
        }
    };
    output::emit(&report, &cfg)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(report.notes.join("; ")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jc-susy: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
