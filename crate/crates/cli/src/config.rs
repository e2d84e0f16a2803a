//! Experiment configuration: a JSON file merged with command-line flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Every field is optional here; each
/// subcommand checks for what it needs after the config file is merged in.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Group shorthand, e.g. `u3` for U_3(p)
    #[arg(long)]
    pub group: Option<String>,
    /// Walk: `a`, `b` or `custom:<law.json>`
    #[arg(long)]
    pub walk: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Replace the second jump size of walk b
    #[arg(long)]
    pub magnitude: Option<u64>,
    /// Comma-separated levels
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// `start:stop:points[:linear|log]`
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
    /// Comma-separated multiples of the cutoff time
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "time-tol")]
    pub time_tol: Option<f64>,
    /// Largest group order to enumerate
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// The merged configuration, echoed into every report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $flags:expr, $($f:ident),*) => {
        $( if $flags.$f.is_some() { $base.$f = $flags.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Usage(format!(
                "config file: line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    /// Read the config file named by `--config` (if any) and apply flags on top.
    pub fn resolve(args: &ConfigArgs) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                Self::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        overlay!(
            cfg, args, group, walk, n, p, magnitude, eps, t_grid, c, samples, pairs, trials, seed,
            time_tol, limit, output, format
        );
        cfg.normalize_group()?;
        Ok(cfg)
    }

    /// Fold `--group uN` into `n`.
    fn normalize_group(&mut self) -> Result<(), CliError> {
        let Some(g) = &self.group else { return Ok(()) };
        let n: usize = g
            .strip_prefix('u')
            .or_else(|| g.strip_prefix('U'))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Usage(format!("unknown group `{g}`; expected uN, e.g. u3")))?;
        match self.n {
            Some(m) if m != n => Err(CliError::Usage(format!("--group {g} conflicts with --n {m}"))),
            _ => {
                self.n = Some(n);
                Ok(())
            }
        }
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Usage("missing --n (or --group uN)".into()))
    }

    pub fn require_p(&self) -> Result<u64, CliError> {
        self.p.ok_or_else(|| CliError::Usage("missing --p".into()))
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("this subcommand is stochastic; --seed is required".into()))
    }

    pub fn walk(&self) -> Result<WalkSelector, CliError> {
        WalkSelector::parse(self.walk.as_deref().unwrap_or("a"))
    }

    pub fn epsilons(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let eps = self.eps.clone().unwrap_or_else(|| default.to_vec());
        if eps.is_empty() {
            return Err(CliError::Usage("--eps list is empty".into()));
        }
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CliError::Usage(format!("ε must lie in (0, 1), got {e}")));
        }
        Ok(eps)
    }

    pub fn grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        self.t_grid.as_deref().map(parse_grid).transpose()
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkSelector {
    A,
    B,
    Custom(PathBuf),
}

impl WalkSelector {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "a" => Ok(WalkSelector::A),
            "b" => Ok(WalkSelector::B),
            _ => match s.strip_prefix("custom:") {
                Some(path) if !path.is_empty() => Ok(WalkSelector::Custom(PathBuf::from(path))),
                _ => Err(CliError::Usage(format!("unknown walk `{s}`; expected a, b or custom:<file>"))),
            },
        }
    }
}

/// Parse `start:stop:points[:linear|log]`. Log grids need `start > 0`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad --t-grid `{spec}`: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad("expected start:stop:points[:linear|log]"));
    }
    let start: f64 = parts[0].parse().map_err(|_| bad("start is not a number"))?;
    let stop: f64 = parts[1].parse().map_err(|_| bad("stop is not a number"))?;
    let points: usize = parts[2].parse().map_err(|_| bad("points is not an integer"))?;
    let log = match parts.get(3) {
        None | Some(&"linear") => false,
        Some(&"log") => true,
        Some(_) => return Err(bad("spacing must be linear or log")),
    };
    if points == 0 {
        return Err(bad("grid is empty"));
    }
    if !(start >= 0.0 && stop >= start && stop.is_finite()) {
        return Err(bad("need 0 <= start <= stop"));
    }
    if log && start <= 0.0 {
        return Err(bad("log spacing needs start > 0"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if log {
                (start.ln() + f * (stop.ln() - start.ln())).exp()
            } else {
                start + f * (stop - start)
            }
        })
        .collect())
}

/// Long flags that take a value; repeated occurrences are reported.
const VALUE_FLAGS: &[&str] = &[
    "config", "group", "walk", "n", "p", "magnitude", "eps", "t-grid", "c", "samples", "pairs",
    "trials", "seed", "time-tol", "limit", "output", "format",
];

/// Names of value flags that appear more than once in `argv`.
pub fn duplicate_flags(argv: &[String]) -> Vec<String> {
    let mut seen = Vec::new();
    let mut dups = Vec::new();
    for arg in argv {
        let Some(name) = arg.strip_prefix("--") else { continue };
        let name = name.split('=').next().unwrap_or(name);
        if !VALUE_FLAGS.contains(&name) {
            continue;
        }
        if seen.iter().any(|s| s == name) {
            if !dups.iter().any(|d| d == name) {
                dups.push(name.to_string());
            }
        } else {
            seen.push(name.to_string());
        }
    }
    dups
}
