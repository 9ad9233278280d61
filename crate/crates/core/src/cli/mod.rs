//! The `qbs` command-line front end.
//!
//! Every subcommand validates all of its parameters before computing, then
//! renders one [`Dataset`] as CSV or JSON to a file or stdout. Flags may also
//! come from a flat `key = value` file given with `--config`; flags on the
//! command line take precedence over the file.

mod commands;
mod figures;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use figures::{figure_recipes, FigureRecipe};
pub use output::{format_number, Column, ColumnData, Dataset};

use crate::error::Error;
use crate::numerics::{parse_quad_order, QUAD_ORDER_ENV};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Io = 1,
    Validation = 2,
    NonConvergence = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Validation,
            CliError::Compute(Error::NonConvergence(_)) => ExitStatus::NonConvergence,
            CliError::Compute(_) => ExitStatus::Validation,
            CliError::Io(_) => ExitStatus::Io,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Inclusive uniform grid written `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Grid { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + h * i as f64 })
            .collect()
    }

    pub fn check_within(&self, name: &'static str, lo: f64, hi: f64) -> Result<(), CliError> {
        if self.start < lo || self.stop < lo || self.start > hi || self.stop > hi {
            return Err(CliError::Usage(format!("{name} must lie in [{lo}, {hi}], got {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
        let (start, stop) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|e| format!("`{}`: {e}", parts[2]))?;
        if !(start.is_finite() && stop.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if count == 0 || count > 1_000_000 {
            return Err(format!("grid count must be in 1..=1000000, got {count}"));
        }
        if count > 1 && !(stop > start) {
            return Err(format!("grid needs stop > start, got `{s}`"));
        }
        Ok(Grid { start, stop, count })
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `Omega t_bs`: a non-negative number, or `inf` for the asymptotic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tbs {
    Finite(f64),
    Infinite,
}

impl FromStr for Tbs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Tbs::Infinite),
            t => {
                let v: f64 = t.parse().map_err(|e| format!("`{s}`: {e}"))?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(format!("must be non-negative, got {v}"));
                }
                Ok(Tbs::Finite(v))
            }
        }
    }
}

impl Serialize for Tbs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tbs::Finite(v) => s.serialize_f64(*v),
            Tbs::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `Omega t_bs` for a dip: a number, or `balanced` for the balanced coupler
/// nearest `5 pi / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipTbs {
    Value(f64),
    Balanced,
}

impl FromStr for DipTbs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("balanced") {
            return Ok(DipTbs::Balanced);
        }
        match s.parse::<Tbs>()? {
            Tbs::Finite(v) => Ok(DipTbs::Value(v)),
            Tbs::Infinite => Err("a dip needs a finite Omega t_bs".into()),
        }
    }
}

impl Serialize for DipTbs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DipTbs::Value(v) => s.serialize_f64(*v),
            DipTbs::Balanced => s.serialize_str("balanced"),
        }
    }
}

/// Pump width: a positive number or `inf` for independent photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpArg(pub Option<f64>);

impl FromStr for PumpArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<Tbs>() {
            Ok(Tbs::Infinite) => Ok(PumpArg(None)),
            Ok(Tbs::Finite(v)) if v > 0.0 => Ok(PumpArg(Some(v))),
            Ok(_) => Err("pump width must be positive".into()),
            Err(e) => Err(e),
        }
    }
}

impl Serialize for PumpArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    /// von Neumann entropy.
    Vn,
    /// Schmidt parameter.
    Schmidt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DipModel {
    /// Frequency-dependent waveguide coupler.
    Waveguide,
    /// Balanced splitter with constant coefficients.
    Conventional,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format (JSON for `evolve`, CSV otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    /// Reflectance R in [0, 1].
    #[arg(long)]
    pub r: f64,
    /// Splitting phase in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub phi: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropySweepArgs {
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    /// Reflectance grid start:stop:count within [0, 1].
    #[arg(long, default_value = "0:1:201")]
    pub r_grid: Grid,
    #[arg(long, value_enum, default_value_t = MeasureArg::Vn)]
    pub measure: MeasureArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    /// Reflectance of a constant splitter.
    #[arg(long, conflicts_with = "sigma_over_omega")]
    pub r: Option<f64>,
    /// Spectral width of identical photons relative to the coupling.
    #[arg(long)]
    pub sigma_over_omega: Option<f64>,
    /// Coupler strength Omega t_bs, or `inf`.
    #[arg(long)]
    pub omega_tbs: Option<Tbs>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WaveguideEntropyArgs {
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    #[arg(long, conflicts_with = "sigma_grid")]
    pub sigma_over_omega: Option<f64>,
    #[arg(long)]
    pub sigma_grid: Option<Grid>,
    /// Coupler strength Omega t_bs, or `inf` for the asymptotic limit.
    #[arg(long, conflicts_with = "omega_tbs_grid")]
    pub omega_tbs: Option<Tbs>,
    #[arg(long)]
    pub omega_tbs_grid: Option<Grid>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HomDipArgs {
    /// Bandwidth ratio Omega_g / Omega.
    #[arg(long, default_value_t = 0.0)]
    pub omega_g_over_omega: f64,
    /// Coupler strength, or `balanced` for the root of <R> = 1/2 nearest 5 pi / 2.
    #[arg(long, default_value = "balanced")]
    pub omega_tbs: DipTbs,
    /// Delays in units of 1 / Omega_g.
    #[arg(long, default_value = "0:10:201")]
    pub delay_grid: Grid,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Pump width, or `inf` for independent photons.
    #[arg(long, default_value = "inf")]
    pub sigma_p: PumpArg,
    #[arg(long, default_value_t = 0.0)]
    pub center1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub center2: f64,
    /// Pump center; defaults to center1 + center2.
    #[arg(long)]
    pub pump_center: Option<f64>,
    #[arg(long, value_enum, default_value_t = DipModel::Waveguide)]
    pub model: DipModel,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VisibilityArgs {
    /// Grid of Omega_g / Omega.
    #[arg(long, default_value = "0:2:41")]
    pub omega_g_grid: Grid,
    /// The balanced coupler nearest this Omega t_bs is used.
    #[arg(long, default_value_t = 2.5 * std::f64::consts::PI)]
    pub omega_tbs_target: f64,
    /// Upper end of the Omega t_bs search.
    #[arg(long, default_value_t = 40.0)]
    pub max_omega_tbs: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigureArgs {
    /// Recipe name, e.g. fig8b.
    #[arg(long, required_unless_present = "list")]
    pub name: Option<String>,
    /// List the available recipes.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub r_grid: Option<Grid>,
    #[arg(long)]
    pub sigma_grid: Option<Grid>,
    #[arg(long)]
    pub omega_tbs_grid: Option<Grid>,
    #[arg(long)]
    pub omega_g_grid: Option<Grid>,
    #[arg(long)]
    pub delay_grid: Option<Grid>,
}

#[derive(Debug, Clone, Subcommand)]
enum CliCommand {
    /// Output photon-number distribution of |s1, s2> at a constant splitter.
    #[command(args_override_self = true)]
    Evolve {
        #[command(flatten)]
        args: EvolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entanglement of the output as a function of R.
    #[command(args_override_self = true)]
    EntropySweep {
        #[command(flatten)]
        args: EntropySweepArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Photon-number statistics at a constant or waveguide splitter.
    #[command(args_override_self = true)]
    Stats {
        #[command(flatten)]
        args: StatsArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entanglement of spectrally broad photons at a waveguide coupler.
    #[command(args_override_self = true)]
    WaveguideEntropy {
        #[command(flatten)]
        args: WaveguideEntropyArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Two-photon interference dip versus delay.
    #[command(args_override_self = true)]
    HomDip {
        #[command(flatten)]
        args: HomDipArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dip visibility of identical photons at balanced couplers.
    #[command(args_override_self = true)]
    Visibility {
        #[command(flatten)]
        args: VisibilityArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduce a named figure dataset.
    #[command(args_override_self = true)]
    Figure {
        #[command(flatten)]
        args: FigureArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Parser)]
#[command(name = "qbs", version, about = "Fock states, entanglement and two-photon interference at beam splitters")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Clone)]
pub enum Command {
    Evolve(EvolveArgs),
    EntropySweep(EntropySweepArgs),
    Stats(StatsArgs),
    WaveguideEntropy(WaveguideEntropyArgs),
    HomDip(HomDipArgs),
    Visibility(VisibilityArgs),
    Figure(FigureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve(_) => "evolve",
            Command::EntropySweep(_) => "entropy-sweep",
            Command::Stats(_) => "stats",
            Command::WaveguideEntropy(_) => "waveguide-entropy",
            Command::HomDip(_) => "hom-dip",
            Command::Visibility(_) => "visibility",
            Command::Figure(_) => "figure",
        }
    }

    fn params_json(&self) -> serde_json::Map<String, serde_json::Value> {
        let v = match self {
            Command::Evolve(a) => serde_json::to_value(a),
            Command::EntropySweep(a) => serde_json::to_value(a),
            Command::Stats(a) => serde_json::to_value(a),
            Command::WaveguideEntropy(a) => serde_json::to_value(a),
            Command::HomDip(a) => serde_json::to_value(a),
            Command::Visibility(a) => serde_json::to_value(a),
            Command::Figure(a) => serde_json::to_value(a),
        };
        let mut map = serde_json::Map::new();
        map.insert("command".into(), self.name().into());
        if let Ok(serde_json::Value::Object(m)) = v {
            map.extend(m);
        }
        map
    }
}

/// A fully parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let format = match command {
            Command::Evolve(_) => Format::Json,
            _ => Format::Csv,
        };
        RunConfig { command, output_path: None, format }
    }

    /// Parses command-line arguments (including the program name).
    pub fn from_args<I, T>(args: I) -> Result<RunConfig, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let (command, out) = match cli.command {
            CliCommand::Evolve { args, out } => (Command::Evolve(args), out),
            CliCommand::EntropySweep { args, out } => (Command::EntropySweep(args), out),
            CliCommand::Stats { args, out } => (Command::Stats(args), out),
            CliCommand::WaveguideEntropy { args, out } => (Command::WaveguideEntropy(args), out),
            CliCommand::HomDip { args, out } => (Command::HomDip(args), out),
            CliCommand::Visibility { args, out } => (Command::Visibility(args), out),
            CliCommand::Figure { args, out } => (Command::Figure(args), out),
        };
        let mut cfg = RunConfig::new(command);
        cfg.output_path = out.output;
        if let Some(f) = out.format {
            cfg.format = f;
        }
        Ok(cfg)
    }
}

/// Computes the dataset for `cfg` without writing anything.
pub fn compute(cfg: &RunConfig) -> Result<Dataset, CliError> {
    commands::validate(&cfg.command)?;
    let mut data = commands::execute(&cfg.command)?;
    let mut params = cfg.command.params_json();
    params.extend(std::mem::take(&mut data.params));
    data.params = params;
    Ok(data)
}

/// Validates, computes and writes the dataset.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    check_quad_env()?;
    if let Some(p) = &cfg.output_path {
        check_writable(p)?;
    }
    let data = compute(cfg)?;
    let text = match cfg.format {
        Format::Csv => data.to_csv(),
        Format::Json => data.to_json(),
    };
    match &cfg.output_path {
        Some(p) => write_atomically(p, &text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}"))),
    }
}

fn check_quad_env() -> Result<(), CliError> {
    match std::env::var(QUAD_ORDER_ENV) {
        Ok(v) => parse_quad_order(&v)
            .map(|_| ())
            .map_err(|e| CliError::Usage(format!("{QUAD_ORDER_ENV}: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Usage(format!("{QUAD_ORDER_ENV}: {e}"))),
    }
}

fn check_writable(path: &Path) -> Result<(), CliError> {
    if path.is_dir() {
        return Err(CliError::Usage(format!("output path {} is a directory", path.display())));
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let meta = fs::metadata(parent)
        .map_err(|e| CliError::Usage(format!("output directory {} is not usable: {e}", parent.display())))?;
    if !meta.is_dir() || meta.permissions().readonly() {
        return Err(CliError::Usage(format!("output directory {} is not writable", parent.display())));
    }
    if let Ok(m) = fs::metadata(path) {
        if m.permissions().readonly() {
            return Err(CliError::Usage(format!("output file {} is read-only", path.display())));
        }
    }
    Ok(())
}

/// Writes through a sibling temporary file so a failed run never leaves a
/// partial artifact behind.
fn write_atomically(path: &Path, text: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let io = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Splits `--config FILE` out of `args` and splices the file's entries in as
/// flags directly after the subcommand, so that explicit flags, which come
/// later, override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config: Option<PathBuf> = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            config = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
    let entries = parse_config(&text)?;

    let mut command = None;
    let mut flags = Vec::new();
    for (k, v) in entries {
        if k == "command" {
            command = Some(v);
            continue;
        }
        match v.to_ascii_lowercase().as_str() {
            "true" => flags.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => {
                flags.push(OsString::from(format!("--{k}")));
                flags.push(OsString::from(v));
            }
        }
    }
    // Position of the subcommand: the first bare token after the program name.
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1);
    let insert_at = match (sub, command) {
        (Some(i), _) => i + 1,
        (None, Some(c)) => {
            let at = 1.min(rest.len());
            rest.insert(at, OsString::from(c));
            at + 1
        }
        (None, None) => return Err(CliError::Usage("no subcommand given on the command line or in the config".into())),
    };
    rest.splice(insert_at..insert_at, flags);
    Ok(rest)
}

/// Flat `key = value` lines; `#` starts a comment. Keys may use `_` or `-`.
fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        let v = v.trim().trim_matches('"').to_string();
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.status().code();
        }
    };
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::Validation.code() } else { ExitStatus::Success.code() };
            let _ = e.print();
            return code;
        }
    };
    match run(&cfg) {
        Ok(()) => ExitStatus::Success.code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.status().code()
        }
    }
}
