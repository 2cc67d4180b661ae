//! Run configuration. Flags and the TOML config file share one schema: every
//! flag `--foo-bar` is the key `foo-bar`; the file also carries `command`.
//! Flags override file values.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Build a solution tuple and verify its residual.
    Construct,
    /// Order tables and threshold verdicts for a jet-differential sweep.
    Jets,
    /// Characteristic, counting and defect experiments.
    Nevanlinna,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Construct => "construct",
            CommandKind::Jets => "jets",
            CommandKind::Nevanlinna => "nevanlinna",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// RNG seed for drawn parameters and sample points.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Omit the generation time from the report.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub no_timestamp: bool,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// CSV path for the main table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,

    /// Solution family (`holo-equal`, `mero-equal`, `holo-general`,
    /// `mero-general`, a catalog id) or jet family (`Cn`, `Sn`, `Cmn`, `Smnl`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Exponents `n₁,…,n_k` of the general families.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<u32>>,
    /// Complex parameters `a₂,…,a_k`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    /// Inner function of a catalog example.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
    /// Number of random parameter draws when no parameters are given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_rings: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_per_ring: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_r_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_r_max: Option<f64>,

    /// Exponent range `a..b`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    /// Exponent pairs `m:n` for `Cmn`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<String>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_exponent: Option<u32>,
    /// Series truncation for chart expansions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,

    /// Function under study.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// `C` or `D`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Counted value: a complex number or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Truncation level of the counting function.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// a-points `z[:multiplicity]`; located automatically when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    /// `lemma52`, `small-function` or `logderiv`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect_check: Option<String>,
    /// `builtin:exp-syzygy` or expressions separated by `;`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    /// Coefficients for the small-function check, separated by `;`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<String>,
    /// Compute `κ r²/𝔗` for a tuple.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub growth_ratio: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(name = "fermatlab", version, about = "Fermat functional-equation laboratory")]
pub struct Cli {
    /// Command; may instead come from the config file.
    pub command: Option<CommandKind>,
    /// TOML config file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub options: Options,
}

const COMMON: &[&str] = &["seed", "no-timestamp", "out", "csv"];
const CONSTRUCT: &[&str] = &[
    "family", "n", "k", "ns", "a", "b", "inner", "draws", "tol", "grid-rings", "grid-per-ring", "grid-r-min",
    "grid-r-max",
];
const JETS: &[&str] = &["family", "range", "n", "m", "pairs", "max-exponent", "truncation"];
const NEVANLINNA: &[&str] = &[
    "f", "surface", "radii", "target", "level", "points", "defect-check", "tuple", "alphas", "growth-ratio", "family",
    "n", "k", "ns", "a", "b", "inner", "slack", "tol", "rel-tol", "abs-tol", "max-evals",
];

fn to_map(o: &Options) -> Map<String, Value> {
    match serde_json::to_value(o).expect("options serialize") {
        Value::Object(m) => m,
        _ => unreachable!("options serialize to an object"),
    }
}

impl RunConfig {
    /// Merges the optional config file with the flags and validates the keys
    /// against the command.
    pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
        let (file_command, file_opts) = match &cli.config {
            Some(path) => load_file(path)?,
            None => (None, Options::default()),
        };
        let command = match (cli.command, file_command) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Schema(format!(
                    "command `{}` conflicts with `{}` in the config file",
                    a.as_str(),
                    b.as_str()
                )))
            }
            (Some(c), _) | (None, Some(c)) => c,
            (None, None) => return Err(CliError::Schema("no command given".into())),
        };
        let mut merged = to_map(&file_opts);
        merged.extend(to_map(&cli.options));
        let options: Options =
            serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Schema(e.to_string()))?;
        let cfg = RunConfig { command, options };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let allowed = match self.command {
            CommandKind::Construct => CONSTRUCT,
            CommandKind::Jets => JETS,
            CommandKind::Nevanlinna => NEVANLINNA,
        };
        for key in to_map(&self.options).keys() {
            if !COMMON.contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
                return Err(CliError::Schema(format!("`{key}` does not apply to `{}`", self.command.as_str())));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.options.seed.unwrap_or(0)
    }

    /// Experiment configuration echoed into the report: everything except
    /// output locations and the timestamp switch.
    pub fn echo(&self) -> Value {
        let mut m = to_map(&self.options);
        for key in ["out", "csv", "no-timestamp"] {
            m.remove(key);
        }
        m.insert("seed".into(), Value::from(self.seed()));
        m.insert("command".into(), Value::from(self.command.as_str()));
        Value::Object(m)
    }
}

fn load_file(path: &Path) -> Result<(Option<CommandKind>, Options), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read config {}: {e}", path.display())))?;
    parse_file(&text)
}

/// Parses config file text.
pub fn parse_file(text: &str) -> Result<(Option<CommandKind>, Options), CliError> {
    let mut table: toml::Table = text.parse().map_err(|e| CliError::Schema(format!("config: {e}")))?;
    let command = match table.remove("command") {
        Some(v) => Some(CommandKind::deserialize(v).map_err(|e| CliError::Schema(format!("config command: {e}")))?),
        None => None,
    };
    let options = Options::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Schema(format!("config: {e}")))?;
    Ok((command, options))
}
