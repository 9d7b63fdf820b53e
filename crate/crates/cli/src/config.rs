//! Run configuration: command-line flags or a JSON document, never both.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "pdm-dirac",
    version,
    about = "Step-mass Dirac spectrum verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Surface,
    Spectrum,
    Verdict,
    Potential,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Feasibility surface f(eta, lambda) as CSV "eta,lambda,f".
    Surface(RunArgs),
    /// Analytic level table for n = 0..n_max.
    Spectrum(RunArgs),
    /// Combined analytic + numeric verdict report (JSON).
    Verdict(RunArgs),
    /// Samples of M(x), Im V(x) and V_eff(x).
    Potential(RunArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Surface(a) => (CommandKind::Surface, a),
            Command::Spectrum(a) => (CommandKind::Spectrum, a),
            Command::Verdict(a) => (CommandKind::Verdict, a),
            Command::Potential(a) => (CommandKind::Potential, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long = "M0")]
    pub m0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "n-max")]
    pub n_max: Option<u32>,
    /// Half width of the solver domain.
    #[arg(long = "L")]
    pub half_width: Option<f64>,
    /// Interior grid points of the solver.
    #[arg(long = "N")]
    pub num_points: Option<usize>,
    /// eta_min,eta_max,lambda_min,lambda_max
    #[arg(long = "box", allow_hyphen_values = true)]
    pub scan_box: Option<String>,
    /// ETAxLAMBDA node counts
    #[arg(long)]
    pub grid: Option<String>,
    /// x_min,x_max for the potential table
    #[arg(long = "x-range", allow_hyphen_values = true)]
    pub x_range: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed for the randomized route-agreement spot check.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace V_eff by the control well 1 - 2 sech^2 x on the numeric side.
    #[arg(long = "control-well")]
    pub control_well: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long = "dump-config")]
    pub dump_config: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// JSON configuration document. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "M0", skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub num_points: Option<usize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub scan_box: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_well: Option<bool>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub settings: ConfigFile,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub dump_config: bool,
}

fn parse_list<T: std::str::FromStr>(
    raw: &str,
    name: &str,
    sep: &[char],
) -> Result<Vec<T>, CliError> {
    raw.split(sep)
        .map(|s| s.trim().parse::<T>())
        .collect::<Result<Vec<T>, _>>()
        .map_err(|_| CliError::BadParams(format!("cannot parse --{name} value `{raw}`")))
}

fn parse_array<const K: usize, T: std::str::FromStr + Copy>(
    raw: &str,
    name: &str,
    sep: &[char],
) -> Result<[T; K], CliError> {
    let items = parse_list::<T>(raw, name, sep)?;
    items
        .try_into()
        .map_err(|_| CliError::BadParams(format!("--{name} expects {K} values, got `{raw}`")))
}

impl RunArgs {
    fn has_parameter_flags(&self) -> bool {
        self.m0.is_some()
            || self.eta.is_some()
            || self.alpha.is_some()
            || self.lambda.is_some()
            || self.n_max.is_some()
            || self.half_width.is_some()
            || self.num_points.is_some()
            || self.scan_box.is_some()
            || self.grid.is_some()
            || self.x_range.is_some()
            || self.samples.is_some()
            || self.seed.is_some()
            || self.control_well
    }

    fn to_config_file(&self) -> Result<ConfigFile, CliError> {
        Ok(ConfigFile {
            m0: self.m0,
            eta: self.eta,
            alpha: self.alpha,
            lambda: self.lambda,
            n_max: self.n_max,
            half_width: self.half_width,
            num_points: self.num_points,
            scan_box: self
                .scan_box
                .as_deref()
                .map(|s| parse_array::<4, f64>(s, "box", &[',']))
                .transpose()?,
            grid: self
                .grid
                .as_deref()
                .map(|s| parse_array::<2, usize>(s, "grid", &['x', 'X', ',']))
                .transpose()?,
            x_range: self
                .x_range
                .as_deref()
                .map(|s| parse_array::<2, f64>(s, "x-range", &[',']))
                .transpose()?,
            samples: self.samples,
            seed: self.seed,
            control_well: self.control_well.then_some(true),
        })
    }
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::BadParams(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::BadParams(format!("invalid config: {e}")))
}

impl RunConfig {
    pub fn resolve(command: CommandKind, args: RunArgs) -> Result<Self, CliError> {
        let settings = match &args.config {
            Some(path) => {
                if args.has_parameter_flags() {
                    return Err(CliError::BadParams(
                        "--config cannot be combined with parameter flags".into(),
                    ));
                }
                load_config_file(path)?
            }
            None => args.to_config_file()?,
        };
        if settings.alpha.is_some() && settings.lambda.is_some() {
            return Err(CliError::BadParams(
                "give either alpha (with M0) or lambda, not both".into(),
            ));
        }
        let default_format = match command {
            CommandKind::Verdict => Format::Json,
            _ => Format::Csv,
        };
        let format = args.format.unwrap_or(default_format);
        if command == CommandKind::Verdict && format != Format::Json {
            return Err(CliError::BadParams("verdict reports are JSON only".into()));
        }
        Ok(Self {
            command,
            settings,
            out: args.out,
            format,
            dump_config: args.dump_config,
        })
    }

    /// JSON document that re-ingests to the same run.
    pub fn dump(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.settings).expect("config serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_config(r#"{"eta": 0.5, "lambda": 1, "mass": 2}"#).is_err());
        let c = parse_config(r#"{"M0": 1, "eta": 0.5, "alpha": 1}"#).unwrap();
        assert_eq!((c.m0, c.eta, c.alpha), (Some(1.0), Some(0.5), Some(1.0)));
        let c = parse_config(r#"{"eta": 0.5, "lambda": 1}"#).unwrap();
        assert_eq!(c.lambda, Some(1.0));
    }

    #[test]
    fn list_flags() {
        let args = RunArgs {
            scan_box: Some("-1,1,0.001,10".into()),
            grid: Some("801x801".into()),
            ..Default::default()
        };
        let c = args.to_config_file().unwrap();
        assert_eq!(c.scan_box, Some([-1.0, 1.0, 0.001, 10.0]));
        assert_eq!(c.grid, Some([801, 801]));
        let bad = RunArgs {
            grid: Some("801".into()),
            ..Default::default()
        };
        assert!(bad.to_config_file().is_err());
    }

    #[test]
    fn single_parameter_source() {
        let args = RunArgs {
            eta: Some(0.5),
            config: Some("x.json".into()),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(CommandKind::Spectrum, args),
            Err(CliError::BadParams(_))
        ));
    }

    #[test]
    fn alpha_and_lambda_conflict() {
        let args = RunArgs {
            eta: Some(0.5),
            alpha: Some(1.0),
            lambda: Some(1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(CommandKind::Spectrum, args).is_err());
    }

    #[test]
    fn verdict_is_json_only() {
        let args = RunArgs {
            format: Some(Format::Csv),
            ..Default::default()
        };
        assert!(RunConfig::resolve(CommandKind::Verdict, args).is_err());
    }

    #[test]
    fn dump_round_trips() {
        let args = RunArgs {
            eta: Some(0.9),
            lambda: Some(0.2),
            grid: Some("11x7".into()),
            seed: Some(4),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(CommandKind::Verdict, args).unwrap();
        assert_eq!(parse_config(&cfg.dump()).unwrap(), cfg.settings);
    }
}
