//! Run configuration: `key = value` files overlaid by command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dgdyn::report::Format;
use dgdyn::timestepper::step_count;
use dgdyn::{example1, example3, InitialProjection, ManufacturedCase, PenaltyMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    Example1,
    /// Example 1 data driven through a time-step study.
    Example2,
    Example3,
}

impl FromStr for Case {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Self::Example1),
            "example2" => Ok(Self::Example2),
            "example3" => Ok(Self::Example3),
            _ => bail!("unknown case `{s}` (example1, example2 or example3)"),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Example1 => "example1",
            Self::Example2 => "example2",
            Self::Example3 => "example3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Steady,
    Transient,
    ConvergeH,
    ConvergeDt,
    Stability,
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "steady" => Ok(Self::Steady),
            "transient" => Ok(Self::Transient),
            "converge_h" => Ok(Self::ConvergeH),
            "converge_dt" => Ok(Self::ConvergeDt),
            "stability" => Ok(Self::Stability),
            _ => bail!("unknown mode `{s}`"),
        }
    }
}

/// Inclusive, non-empty, increasing level list. Accepts `4`, `2..5` or `2,3,5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Levels(pub Vec<u32>);

impl FromStr for Levels {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let levels: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
            (a..=b).collect()
        } else {
            s.split(',').map(|t| t.trim().parse::<u32>()).collect::<std::result::Result<_, _>>()?
        };
        if levels.is_empty() {
            bail!("empty level range `{s}`");
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            bail!("levels must be increasing: `{s}`");
        }
        Ok(Self(levels))
    }
}

/// Resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub case: Case,
    pub mode: Mode,
    pub p: usize,
    pub levels: Levels,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub dt: f64,
    pub dt_count: usize,
    pub t_final: f64,
    pub penalty_mode: PenaltyMode,
    pub projection: InitialProjection,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub dump_matrix: Option<PathBuf>,
}

/// Keys accepted in files; flags use the same names with `-` for `_`.
pub const KEYS: [&str; 17] = [
    "case", "mode", "p", "level", "levels", "gamma", "alpha", "beta", "lambda", "dt", "dt_count", "t_final", "penalty_mode",
    "projection", "threads", "out", "format",
];

impl ProblemConfig {
    /// Defaults for a case and mode before any file or flag is applied.
    pub fn defaults(case: Case, mode: Mode) -> Self {
        let (dt, t_final, levels) = match (case, mode) {
            (Case::Example3, _) => (1e-3, 0.1, vec![2, 3, 4, 5]),
            (Case::Example2, _) | (_, Mode::ConvergeDt) => (0.1, 0.1, vec![6]),
            (_, Mode::Stability) => (1e-3, 0.1, vec![3]),
            _ => (1e-5, 1e-3, vec![2, 3, 4, 5]),
        };
        let levels = match mode {
            Mode::ConvergeH => levels,
            _ => vec![*levels.last().unwrap()],
        };
        Self {
            case,
            mode,
            p: 1,
            levels: Levels(levels),
            gamma: 10.0,
            alpha: 2.0,
            beta: 5.0,
            lambda: 10.0,
            dt,
            dt_count: 5,
            t_final,
            penalty_mode: PenaltyMode::GammaOverH,
            projection: InitialProjection::default(),
            threads: 1,
            out: None,
            format: Format::Csv,
            dump_matrix: None,
        }
    }

    /// Applies `pairs` in order on top of the case defaults. `case` and
    /// `mode` are read first because the other defaults depend on them.
    pub fn from_pairs(mode: Mode, pairs: &[(String, String)]) -> Result<Self> {
        let lookup = |k: &str| pairs.iter().rev().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let case = lookup("case").map(Case::from_str).transpose()?.unwrap_or(Case::Example1);
        let mut cfg = Self::defaults(case, mode);
        for (k, v) in pairs {
            cfg.set(k, v).with_context(|| format!("setting `{k}`"))?;
        }
        cfg.mode = mode;
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| v.parse::<f64>().map_err(|e| anyhow!("`{v}`: {e}"));
        match key {
            "case" => self.case = value.parse()?,
            // the subcommand decides the mode; the key is accepted for shared files
            "mode" => {
                value.parse::<Mode>()?;
            }
            "p" => self.p = value.parse()?,
            "level" | "levels" => self.levels = value.parse()?,
            "gamma" => self.gamma = num(value)?,
            "alpha" => self.alpha = num(value)?,
            "beta" => self.beta = num(value)?,
            "lambda" => self.lambda = num(value)?,
            "dt" => self.dt = num(value)?,
            "dt_count" => self.dt_count = value.parse()?,
            "t_final" => self.t_final = num(value)?,
            "penalty_mode" => self.penalty_mode = value.parse().map_err(|e| anyhow!("{e}"))?,
            "projection" => self.projection = value.parse().map_err(|e: String| anyhow!(e))?,
            "threads" => self.threads = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse().map_err(|e: String| anyhow!(e))?,
            "dump_matrix" => self.dump_matrix = Some(PathBuf::from(value)),
            _ => bail!("unknown key"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.p) {
            bail!("p must be 1 or 2, got {}", self.p);
        }
        if self.mode != Mode::Steady {
            step_count(self.dt, self.t_final)?;
        }
        if self.mode == Mode::ConvergeDt && self.dt_count == 0 {
            bail!("dt_count must be positive");
        }
        if self.threads == 0 {
            bail!("threads must be positive");
        }
        Ok(())
    }

    pub fn manufactured(&self) -> ManufacturedCase {
        let base = match self.case {
            Case::Example1 | Case::Example2 => example1(),
            Case::Example3 => example3(),
        };
        base.with_coefficients(self.alpha, self.beta, self.lambda)
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) && key != "dump_matrix" {
            bail!("line {}: unknown key `{}`", n + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}
