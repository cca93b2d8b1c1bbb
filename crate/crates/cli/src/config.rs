use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use qlz_core::FockSpec;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    SolveRwa,
    SolveFull,
    Asymptote,
    Figure,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveRwa => "solve-rwa",
            Command::SolveFull => "solve-full",
            Command::Asymptote => "asymptote",
            Command::Figure => "figure",
            Command::Validate => "validate",
        }
    }
}

/// Quantized Landau-Zener solver: closed-form RWA dynamics, strong-coupling
/// integration and figure data.
///
/// Every flag may also be given in a `--config` file as `key = value`
/// lines (keys are the long flag names, `#` starts a comment); flags win.
#[derive(Parser, Debug, Default)]
#[command(name = "qlz", version)]
pub struct Flags {
    /// solve-rwa, solve-full, asymptote, figure or validate.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Figure number (1-5) for the `figure` command.
    pub figure: Option<u8>,
    /// Qubit-field coupling g.
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Initial scaled time.
    #[arg(long, allow_negative_numbers = true)]
    pub tau0: Option<f64>,
    /// Final scaled time.
    #[arg(long, allow_negative_numbers = true)]
    pub tau1: Option<f64>,
    /// Initial state, `fock:<n>,<g|e>`.
    #[arg(long)]
    pub state: Option<String>,
    /// Fock-space truncation (highest photon number kept).
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Number of output samples on a uniform grid.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key-value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run configuration. `None` means "use the command default".
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub figure: Option<u8>,
    pub g: Option<f64>,
    pub tau0: Option<f64>,
    pub tau1: Option<f64>,
    pub state: Option<FockSpec>,
    pub n_max: Option<usize>,
    pub samples: Option<usize>,
    pub rel_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

const KEYS: [&str; 11] = [
    "command", "figure", "g", "tau0", "tau1", "state", "nmax", "samples", "rel-tol", "out", "format",
];

pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("invalid value `{v}` for `{key}`: {e}")))
        })
        .transpose()
}

fn enum_from_file<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| T::from_str(v, true).map_err(|_| CliError::Config(format!("invalid value `{v}` for `{key}`"))))
        .transpose()
}

impl RunConfig {
    pub fn resolve(flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let command = flags
            .command
            .or(enum_from_file(&file, "command")?)
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let state = match flags.state {
            Some(s) => Some(s),
            None => file.get("state").cloned(),
        }
        .map(|s| s.parse::<FockSpec>().map_err(|e| CliError::Config(e.to_string())))
        .transpose()?;
        let config = RunConfig {
            command,
            figure: flags.figure.or(from_file(&file, "figure")?),
            g: flags.g.or(from_file(&file, "g")?),
            tau0: flags.tau0.or(from_file(&file, "tau0")?),
            tau1: flags.tau1.or(from_file(&file, "tau1")?),
            state,
            n_max: flags.nmax.or(from_file(&file, "nmax")?),
            samples: flags.samples.or(from_file(&file, "samples")?),
            rel_tol: flags.rel_tol.or(from_file(&file, "rel-tol")?),
            out: flags.out.or(from_file(&file, "out")?),
            format: flags.format.or(enum_from_file(&file, "format")?).unwrap_or(Format::Csv),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => Err(CliError::Config(format!("{name} must be finite"))),
            _ => Ok(()),
        };
        finite("g", self.g)?;
        finite("tau0", self.tau0)?;
        finite("tau1", self.tau1)?;
        if matches!(self.g, Some(g) if g < 0.0) {
            return Err(CliError::Config("g must be non-negative".into()));
        }
        if matches!(self.rel_tol, Some(t) if !(t > 0.0 && t < 1.0)) {
            return Err(CliError::Config("rel-tol must lie in (0, 1)".into()));
        }
        if matches!(self.samples, Some(0)) {
            return Err(CliError::Config("samples must be positive".into()));
        }
        match (self.command, self.figure) {
            (Command::Figure, Some(1..=5)) => {}
            (Command::Figure, Some(n)) => return Err(CliError::Config(format!("no figure {n}; expected 1-5"))),
            (Command::Figure, None) => return Err(CliError::Config("figure number required".into())),
            (_, Some(_)) => return Err(CliError::Config("a figure number is only valid with `figure`".into())),
            _ => {}
        }
        if matches!(self.command, Command::Figure | Command::Validate) {
            let fixed = [
                ("g", self.g.is_some()),
                ("tau0", self.tau0.is_some()),
                ("tau1", self.tau1.is_some()),
                ("state", self.state.is_some()),
                ("nmax", self.n_max.is_some()),
            ];
            if let Some((name, _)) = fixed.iter().find(|(_, set)| *set) {
                return Err(CliError::Config(format!(
                    "`{}` uses fixed parameters; `{name}` cannot be set",
                    self.command.name()
                )));
            }
        }
        Ok(())
    }
}
