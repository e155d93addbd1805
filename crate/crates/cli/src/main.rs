use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dgdyn_cli::{parse_config_text, run, Mode, ProblemConfig};

#[derive(Parser)]
#[command(name = "dgdyn", about = "DG solver for parabolic problems with dynamic boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once at the finest level and report the final errors.
    Solve {
        /// Solve the stationary problem instead of time stepping.
        #[arg(long)]
        steady: bool,
        /// Write the system matrix as `n nnz` followed by `row col value` lines.
        #[arg(long, value_name = "PATH")]
        dump_matrix: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Errors and rates over a sequence of mesh levels.
    ConvergeH(Common),
    /// Errors and rates over halving time steps at a fixed level.
    ConvergeDt(Common),
    /// L²_λ norm history of a source-free run.
    Stability(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags given here override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    level: Option<String>,
    /// `2..5`, `2,3,4` or a single level.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// Number of halvings in `converge-dt`.
    #[arg(long)]
    dt_count: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    /// `gamma_over_h` or `fixed_sigma`.
    #[arg(long)]
    penalty_mode: Option<String>,
    /// Initial projection: `lambda` or `domain`.
    #[arg(long)]
    projection: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// `csv` or `markdown`.
    #[arg(long)]
    format: Option<String>,
}

impl Common {
    fn pairs(&self) -> Result<Vec<(String, String)>> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_config_text(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => Vec::new(),
        };
        let flags = [
            ("case", &self.case),
            ("p", &self.p),
            ("level", &self.level),
            ("levels", &self.levels),
            ("gamma", &self.gamma),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("lambda", &self.lambda),
            ("dt", &self.dt),
            ("dt_count", &self.dt_count),
            ("t_final", &self.t_final),
            ("penalty_mode", &self.penalty_mode),
            ("projection", &self.projection),
            ("threads", &self.threads),
            ("out", &self.out),
            ("format", &self.format),
        ];
        pairs.extend(flags.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))));
        Ok(pairs)
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (mode, common, dump) = match cli.command {
        Command::Solve { steady, dump_matrix, common } => (if steady { Mode::Steady } else { Mode::Transient }, common, dump_matrix),
        Command::ConvergeH(c) => (Mode::ConvergeH, c, None),
        Command::ConvergeDt(c) => (Mode::ConvergeDt, c, None),
        Command::Stability(c) => (Mode::Stability, c, None),
    };
    let mut cfg = ProblemConfig::from_pairs(mode, &common.pairs()?)?;
    if dump.is_some() {
        cfg.dump_matrix = dump;
    }
    let text = run(&cfg)?.render(cfg.format);
    match &cfg.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
