//! Flag parsing, problem files and the validated run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use delayheat::fd_oracle::Grid;
use delayheat::solver::DEFAULT_N_MAX;
use delayheat::spectrum::DEFAULT_BRANCH_COUNT;
use delayheat::{HistorySpec, PhysicalParams, Problem, Profile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Version tag shared by problem files and sidecars.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_X_SAMPLES: usize = 65;
pub const DEFAULT_N_OUT: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "delayheat", version, about = "Delayed heat equation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Evaluate one branch of the Lambert W function.
    #[command(allow_negative_numbers = true)]
    Lambertw(Options),
    /// Spatial rates paired with a temporal rate b (delayed heat equation).
    #[command(allow_negative_numbers = true)]
    Roots(Options),
    /// Spatial rates paired with b for delayed advection-diffusion.
    #[command(allow_negative_numbers = true)]
    AdvectionRoots(Options),
    /// Per-mode characteristic roots and stability of the Dirichlet problem.
    #[command(allow_negative_numbers = true)]
    Stability(Options),
    /// Exact modal solution sampled on a uniform grid.
    #[command(allow_negative_numbers = true)]
    SimulateModal(Options),
    /// Finite-difference solution on a uniform grid.
    #[command(allow_negative_numbers = true)]
    SimulateFd(Options),
}

/// Every parameter flag. Each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Domain length L > 0.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Diffusivity D > 0.
    #[arg(long = "D")]
    pub diffusivity: Option<f64>,
    /// Delay tau >= 0.
    #[arg(long = "tau")]
    pub delay: Option<f64>,
    /// Advection speed epsilon >= 0.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of sine modes (stability rows or modal truncation).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Conjugate branch pairs beyond the principal pair.
    #[arg(long)]
    pub branch_count: Option<u32>,
    /// Temporal rate b.
    #[arg(long)]
    pub b: Option<f64>,
    /// Real part of the Lambert W argument.
    #[arg(long)]
    pub z: Option<f64>,
    /// Imaginary part of the Lambert W argument.
    #[arg(long)]
    pub z_im: Option<f64>,
    /// Lambert W branch index.
    #[arg(long)]
    pub k: Option<i32>,
    /// Spatial node count including both boundaries.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Requested time step; shrunk so it divides tau.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of output intervals in time.
    #[arg(long)]
    pub n_out: Option<usize>,
    /// History profile, e.g. `sine:1`, `sines:1=1,2=0.5`, `parabola:1`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Output file; a sidecar is written next to it. Stdout if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Problem file with `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Lambertw,
    Roots,
    AdvectionRoots,
    Stability,
    SimulateModal,
    SimulateFd,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Lambertw => "lambertw",
            Subcommand::Roots => "roots",
            Subcommand::AdvectionRoots => "advection-roots",
            Subcommand::Stability => "stability",
            Subcommand::SimulateModal => "simulate-modal",
            Subcommand::SimulateFd => "simulate-fd",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully resolved and validated run. Parameters a subcommand does not use
/// are `None`; used ones carry their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    #[serde(rename = "D")]
    pub diffusivity: Option<f64>,
    #[serde(rename = "tau")]
    pub delay: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_max: Option<usize>,
    pub branch_count: Option<u32>,
    pub b: Option<f64>,
    pub z: Option<f64>,
    pub z_im: Option<f64>,
    pub k: Option<i32>,
    pub nx: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub n_out: Option<usize>,
    pub profile: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    Unused,
    Required,
    Optional,
}

// Keys of the problem file, in the order they appear in `Options`.
const KEYS: [&str; 15] = [
    "L",
    "D",
    "tau",
    "epsilon",
    "n_max",
    "branch_count",
    "b",
    "z",
    "z_im",
    "k",
    "nx",
    "dt",
    "t_end",
    "n_out",
    "profile",
];

fn needs(subcommand: Subcommand, key: &str) -> Need {
    use Need::*;
    use Subcommand::*;
    match (subcommand, key) {
        (Lambertw, "z") => Required,
        (Lambertw, "z_im" | "k") => Optional,
        (Roots, "D" | "b") => Required,
        (Roots, "tau") => Optional,
        (AdvectionRoots, "D" | "b") => Required,
        (AdvectionRoots, "tau" | "epsilon") => Optional,
        (Stability, "L" | "D") => Required,
        (Stability, "tau" | "n_max" | "branch_count") => Optional,
        (SimulateModal, "L" | "D" | "profile" | "t_end") => Required,
        (SimulateModal, "tau" | "n_max" | "nx" | "n_out") => Optional,
        (SimulateFd, "L" | "D" | "profile" | "t_end" | "dt") => Required,
        (SimulateFd, "tau" | "epsilon" | "nx" | "n_out") => Optional,
        _ => Unused,
    }
}

/// Problem-file contents: `key = value` lines, `#` comments, and a mandatory
/// `version` line matching [`SCHEMA_VERSION`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProblemFile {
    pub entries: Vec<(String, String)>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut version = None;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "problem file line {}: expected `key = value`",
                    number + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "version" {
                version = Some(value.to_string());
                continue;
            }
            if key == "format" {
                value.parse::<Format>().map_err(|e| config_err(key, e))?;
            } else if !KEYS.contains(&key) {
                return Err(CliError::Config(format!(
                    "problem file line {}: unknown key `{key}`",
                    number + 1
                )));
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(CliError::Config(format!(
                    "problem file: key `{key}` given twice"
                )));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        match version {
            Some(v) if v == SCHEMA_VERSION.to_string() => Ok(Self { entries }),
            Some(v) => Err(CliError::Config(format!(
                "problem file version `{v}` does not match schema version {SCHEMA_VERSION}"
            ))),
            None => Err(CliError::Config(
                "problem file has no `version` line".into(),
            )),
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Fills every option not set on the command line from the file.
    fn fill(&self, options: &mut Options) -> Result<(), CliError> {
        fn set<T: FromStr>(
            slot: &mut Option<T>,
            file: &ProblemFile,
            key: &str,
        ) -> Result<(), CliError>
        where
            T::Err: fmt::Display,
        {
            if slot.is_none() {
                if let Some(raw) = file.get(key) {
                    *slot = Some(raw.parse().map_err(|e| config_err(key, e))?);
                }
            }
            Ok(())
        }
        set(&mut options.length, self, "L")?;
        set(&mut options.diffusivity, self, "D")?;
        set(&mut options.delay, self, "tau")?;
        set(&mut options.epsilon, self, "epsilon")?;
        set(&mut options.n_max, self, "n_max")?;
        set(&mut options.branch_count, self, "branch_count")?;
        set(&mut options.b, self, "b")?;
        set(&mut options.z, self, "z")?;
        set(&mut options.z_im, self, "z_im")?;
        set(&mut options.k, self, "k")?;
        set(&mut options.nx, self, "nx")?;
        set(&mut options.dt, self, "dt")?;
        set(&mut options.t_end, self, "t_end")?;
        set(&mut options.n_out, self, "n_out")?;
        set(&mut options.profile, self, "profile")?;
        set(&mut options.format, self, "format")?;
        Ok(())
    }
}

fn config_err(key: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("invalid value for `{key}`: {reason}"))
}

/// Result of command-line parsing: a run, or text clap wants printed with
/// success (help, version).
pub enum Parsed {
    Run(Box<RunConfig>),
    Display(String),
}

/// Parses `argv` (program name first), merges the problem file if one is
/// named, and validates the result.
pub fn parse_config<I, T>(argv: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => return Ok(Parsed::Display(e.to_string())),
        Err(e) => return Err(CliError::Config(e.to_string().trim_end().to_string())),
    };
    let (subcommand, options) = match cli.command {
        Command::Lambertw(o) => (Subcommand::Lambertw, o),
        Command::Roots(o) => (Subcommand::Roots, o),
        Command::AdvectionRoots(o) => (Subcommand::AdvectionRoots, o),
        Command::Stability(o) => (Subcommand::Stability, o),
        Command::SimulateModal(o) => (Subcommand::SimulateModal, o),
        Command::SimulateFd(o) => (Subcommand::SimulateFd, o),
    };
    let file = options
        .config
        .as_deref()
        .map(ProblemFile::read)
        .transpose()?;
    resolve(subcommand, options, file.as_ref()).map(|c| Parsed::Run(Box::new(c)))
}

/// Merges flags over file values, applies defaults and validates.
pub fn resolve(
    subcommand: Subcommand,
    flags: Options,
    file: Option<&ProblemFile>,
) -> Result<RunConfig, CliError> {
    // Flags the subcommand does not read are mistakes; unused file keys are
    // fine because one file may describe a problem for several subcommands.
    for (key, given) in flag_presence(&flags) {
        if given && needs(subcommand, key) == Need::Unused {
            return Err(CliError::Config(format!(
                "`{subcommand}` does not take --{key}"
            )));
        }
    }
    let mut options = flags;
    if let Some(file) = file {
        file.fill(&mut options)?;
    }
    for (key, given) in flag_presence(&options) {
        if !given && needs(subcommand, key) == Need::Required {
            return Err(CliError::Config(format!("`{subcommand}` requires --{key}")));
        }
    }

    let used = |key: &str| needs(subcommand, key) != Need::Unused;
    let pick = |value: Option<f64>, key: &str, default: Option<f64>| {
        used(key).then(|| value.or(default)).flatten()
    };
    let pick_usize = |value: Option<usize>, key: &str, default: usize| {
        used(key).then(|| value.unwrap_or(default))
    };

    let config = RunConfig {
        subcommand,
        length: pick(options.length, "L", None),
        diffusivity: pick(options.diffusivity, "D", None),
        delay: pick(options.delay, "tau", Some(0.0)),
        epsilon: pick(options.epsilon, "epsilon", Some(0.0)),
        n_max: pick_usize(options.n_max, "n_max", DEFAULT_N_MAX),
        branch_count: used("branch_count")
            .then(|| options.branch_count.unwrap_or(DEFAULT_BRANCH_COUNT)),
        b: pick(options.b, "b", None),
        z: pick(options.z, "z", None),
        z_im: pick(options.z_im, "z_im", Some(0.0)),
        k: used("k").then(|| options.k.unwrap_or(0)),
        nx: pick_usize(options.nx, "nx", DEFAULT_X_SAMPLES),
        dt: pick(options.dt, "dt", None),
        t_end: pick(options.t_end, "t_end", None),
        n_out: pick_usize(options.n_out, "n_out", DEFAULT_N_OUT),
        profile: used("profile").then(|| options.profile.clone()).flatten(),
        output: options.output.clone(),
        format: options.format.unwrap_or_default(),
    };
    config.validate()?;
    Ok(config)
}

fn flag_presence(o: &Options) -> [(&'static str, bool); 15] {
    [
        ("L", o.length.is_some()),
        ("D", o.diffusivity.is_some()),
        ("tau", o.delay.is_some()),
        ("epsilon", o.epsilon.is_some()),
        ("n_max", o.n_max.is_some()),
        ("branch_count", o.branch_count.is_some()),
        ("b", o.b.is_some()),
        ("z", o.z.is_some()),
        ("z_im", o.z_im.is_some()),
        ("k", o.k.is_some()),
        ("nx", o.nx.is_some()),
        ("dt", o.dt.is_some()),
        ("t_end", o.t_end.is_some()),
        ("n_out", o.n_out.is_some()),
        ("profile", o.profile.is_some()),
    ]
}

// Constraint violations become configuration errors; anything else reported
// while building core types is a numerical failure.
fn constraint(module: &'static str) -> impl Fn(delayheat::Error) -> CliError {
    move |e| match e {
        delayheat::Error::InvalidParameter { name, constraint } => {
            CliError::Config(format!("{name} {constraint}"))
        }
        other => CliError::Numeric {
            module,
            source: other,
        },
    }
}

impl RunConfig {
    /// Re-parses a sidecar document into the configuration it records.
    pub fn from_sidecar(text: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Sidecar {
            schema_version: u32,
            config: RunConfig,
        }
        let sidecar: Sidecar =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("sidecar: {e}")))?;
        if sidecar.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "sidecar schema version {} does not match {SCHEMA_VERSION}",
                sidecar.schema_version
            )));
        }
        sidecar.config.validate()?;
        Ok(sidecar.config)
    }

    pub fn params(&self) -> Result<PhysicalParams, CliError> {
        let d = self
            .diffusivity
            .ok_or_else(|| CliError::Config("D is required".into()))?;
        PhysicalParams::new(d, self.delay.unwrap_or(0.0), self.epsilon.unwrap_or(0.0))
            .map_err(constraint("dispersion"))
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let length = self
            .length
            .ok_or_else(|| CliError::Config("L is required".into()))?;
        let profile = match &self.profile {
            Some(text) => text
                .parse::<Profile>()
                .map_err(|e| config_err("profile", e))?,
            None => Profile::Zero,
        };
        let n_max = self.n_max.unwrap_or(DEFAULT_N_MAX);
        Problem::new(
            length,
            self.params()?,
            HistorySpec::constant(profile),
            n_max,
        )
        .map_err(constraint("spectrum"))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let problem = self.problem()?;
        let (nx, dt, t_end) = (
            self.nx.unwrap_or(DEFAULT_X_SAMPLES),
            self.dt
                .ok_or_else(|| CliError::Config("dt is required".into()))?,
            self.t_end
                .ok_or_else(|| CliError::Config("t_end is required".into()))?,
        );
        let grid = Grid::new(nx, problem.length, &problem.params, dt, t_end)
            .map_err(constraint("fd_oracle"))?;
        let courant = problem.params.advection * grid.dt / grid.dx;
        if courant > 1.0 {
            return Err(CliError::Config(format!(
                "epsilon dt / dx = {courant:.6} exceeds 1 after adjusting dt to {:e}",
                grid.dt
            )));
        }
        Ok(grid)
    }

    /// Checks every constraint the subcommand relies on.
    pub fn validate(&self) -> Result<(), CliError> {
        for (key, value) in [
            ("L", self.length),
            ("b", self.b),
            ("z", self.z),
            ("z_im", self.z_im),
            ("t_end", self.t_end),
            ("dt", self.dt),
        ] {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(CliError::Config(format!("{key} must be finite, got {v}")));
                }
            }
        }
        if let Some(t_end) = self.t_end {
            if t_end <= 0.0 {
                return Err(CliError::Config(format!("t_end must be > 0, got {t_end}")));
            }
        }
        if self.n_out == Some(0) {
            return Err(CliError::Config("n_out must be >= 1".into()));
        }
        if self.branch_count == Some(0) {
            return Err(CliError::Config("branch_count must be >= 1".into()));
        }
        match self.subcommand {
            Subcommand::Lambertw => Ok(()),
            Subcommand::Roots | Subcommand::AdvectionRoots => self.params().map(drop),
            Subcommand::Stability => self.problem().map(drop),
            Subcommand::SimulateModal => {
                if self.nx.is_some_and(|nx| nx < 2) {
                    return Err(CliError::Config("nx must be >= 2".into()));
                }
                self.problem().map(drop)
            }
            Subcommand::SimulateFd => self.grid().map(drop),
        }
    }
}
