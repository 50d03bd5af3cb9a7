//! Run configuration: a TOML document with top-level run settings and one
//! input section per command.

use std::fmt;

use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    FgExpand,
    ExtendTractor,
    CheckTwoPlane,
    Fhol,
    CheckPe,
    CheckCr,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::FgExpand, Command::ExtendTractor, Command::CheckTwoPlane, Command::Fhol, Command::CheckPe, Command::CheckCr];

    pub fn name(self) -> &'static str {
        match self {
            Command::FgExpand => "fg-expand",
            Command::ExtendTractor => "extend-tractor",
            Command::CheckTwoPlane => "check-2plane",
            Command::Fhol => "fhol",
            Command::CheckPe => "check-pe",
            Command::CheckCr => "check-cr",
        }
    }

    pub fn parse(s: &str) -> Result<Command, CliError> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
            CliError::Config(format!("unknown command '{s}' (expected one of {})", known.join(", ")))
        })
    }

    fn default_x_order(self) -> u32 {
        match self {
            Command::CheckTwoPlane => 7,
            _ => 6,
        }
    }

    /// Input sections this command accepts.
    fn accepted_inputs(self) -> &'static [InputKind] {
        match self {
            Command::FgExpand => &[InputKind::Metric],
            Command::ExtendTractor => &[InputKind::Tractor, InputKind::PeFamily],
            Command::CheckTwoPlane => &[InputKind::TwoPlane],
            Command::Fhol => &[InputKind::Fhol],
            Command::CheckPe => &[InputKind::PeFamily],
            Command::CheckCr => &[InputKind::Cr],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode, CliError> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(CliError::Config(format!("unknown mode '{s}' (expected exact or float)"))),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Metric,
    Tractor,
    TwoPlane,
    Fhol,
    PeFamily,
    Cr,
}

impl InputKind {
    fn section(self) -> &'static str {
        match self {
            InputKind::Metric => "metric",
            InputKind::Tractor => "tractor",
            InputKind::TwoPlane => "two_plane",
            InputKind::Fhol => "fhol",
            InputKind::PeFamily => "pe_family",
            InputKind::Cr => "cr",
        }
    }
}

/// A metric given by its component expressions.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricInput {
    /// Coordinate names; defaults to `x1..xn`.
    pub variables: Option<Vec<String>>,
    /// Expansion point; each coordinate `v` is replaced by `c + v`.
    pub center: Option<Vec<String>>,
    /// Full symmetric matrix of component expressions.
    pub matrix: Option<Vec<Vec<String>>>,
    /// Diagonal components, for diagonal metrics.
    pub diagonal: Option<Vec<String>>,
    /// Overall factor multiplying every component.
    pub conformal_factor: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractorInput {
    /// Scale `σ`; the seed is the tractor `D σ` of this density.
    pub sigma: Option<String>,
    /// Explicit splitting `(χ₀, χ₁..χₙ, χ_∞)`.
    pub components: Option<Vec<String>>,
    pub metric: MetricInput,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPlaneInput {
    #[serde(rename = "F")]
    pub f: String,
    /// Names for `(x, y, z, p, q)`.
    pub variables: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FholInput {
    pub f: String,
    pub variables: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeInput {
    /// Names for the `Σ` coordinates; defaults to `y1..yd`.
    pub variables: Option<Vec<String>>,
    /// Coefficients of `uᵐ` in `k_u` (even families).
    pub k: Option<Vec<Vec<Vec<String>>>>,
    /// Coefficients of `rᵐ` in `h_r`.
    pub h: Option<Vec<Vec<Vec<String>>>>,
    /// Whether the family is exactly the given polynomial in `u` (or `r`).
    #[serde(default = "yes")]
    pub polynomial: bool,
    /// Chart point `s₀` for the doubled Poincaré metric check.
    pub juhl_s0: Option<String>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrInput {
    /// Defining function in `z1..zn, zb1..zbn` (`zb` the conjugate variables).
    pub u: String,
    pub variables: Option<Vec<String>>,
    /// Real base point; each `zi` and `zbi` is shifted by `center[i]`.
    pub center: Option<Vec<String>>,
}

/// Optional expected outcomes; each present key adds a verdict.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub generic: Option<bool>,
    pub three_degenerate: Option<bool>,
    pub l_rank: Option<usize>,
    pub l_injective: Option<bool>,
    pub quartic: Option<Vec<String>>,
    pub quartic_zero: Option<bool>,
    pub einstein: Option<bool>,
    pub ricci_flat: Option<bool>,
    pub achieved_order: Option<u32>,
    pub levi_determinant_one: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<String>,
    pub dimension: Option<usize>,
    pub x_order: Option<u32>,
    pub rho_order: Option<u32>,
    pub mode: Option<String>,
    pub tolerance: Option<f64>,
    pub metric: Option<MetricInput>,
    pub tractor: Option<TractorInput>,
    pub two_plane: Option<TwoPlaneInput>,
    pub fhol: Option<FholInput>,
    pub pe_family: Option<PeInput>,
    pub cr: Option<CrInput>,
    #[serde(default)]
    pub expect: Expectations,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("unparseable config: {}", e.message())))
    }
}

/// The single input object of a run.
#[derive(Clone, Debug)]
pub enum Input {
    Metric(MetricInput),
    Tractor(TractorInput),
    TwoPlane(TwoPlaneInput),
    Fhol(FholInput),
    PeFamily(PeInput),
    Cr(CrInput),
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub command: Option<String>,
    pub x_order: Option<u32>,
    pub rho_order: Option<u32>,
    pub mode: Option<String>,
    pub tolerance: Option<f64>,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub dimension: Option<usize>,
    pub x_order: u32,
    pub rho_order: u32,
    pub mode: Mode,
    pub tolerance: f64,
    pub input: Input,
    pub expect: Expectations,
}

pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_RHO_ORDER: u32 = 2;

impl RunConfig {
    pub fn resolve(raw: RawConfig, ov: &Overrides) -> Result<RunConfig, CliError> {
        let name = ov
            .command
            .clone()
            .or(raw.command.clone())
            .ok_or_else(|| CliError::Config("no command given (set `command` or pass --command)".into()))?;
        let command = Command::parse(&name)?;
        let mode = Mode::parse(ov.mode.as_deref().or(raw.mode.as_deref()).unwrap_or("exact"))?;
        let x_order = ov.x_order.or(raw.x_order).unwrap_or(command.default_x_order());
        let rho_order = ov.rho_order.or(raw.rho_order).unwrap_or(DEFAULT_RHO_ORDER);
        if x_order == 0 || rho_order == 0 {
            return Err(CliError::Config("truncation orders must be positive".into()));
        }
        let tolerance = match mode {
            Mode::Exact => 0.0,
            Mode::Float => ov.tolerance.or(raw.tolerance).unwrap_or(DEFAULT_FLOAT_TOLERANCE),
        };
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(CliError::Config("tolerance must be a finite nonnegative number".into()));
        }
        if raw.dimension == Some(0) {
            return Err(CliError::Config("dimension must be positive".into()));
        }

        let mut present: Vec<Input> = Vec::new();
        let mut names: Vec<&str> = Vec::new();
        if let Some(m) = raw.metric {
            present.push(Input::Metric(m));
            names.push(InputKind::Metric.section());
        }
        if let Some(t) = raw.tractor {
            present.push(Input::Tractor(t));
            names.push(InputKind::Tractor.section());
        }
        if let Some(t) = raw.two_plane {
            present.push(Input::TwoPlane(t));
            names.push(InputKind::TwoPlane.section());
        }
        if let Some(t) = raw.fhol {
            present.push(Input::Fhol(t));
            names.push(InputKind::Fhol.section());
        }
        if let Some(t) = raw.pe_family {
            present.push(Input::PeFamily(t));
            names.push(InputKind::PeFamily.section());
        }
        if let Some(t) = raw.cr {
            present.push(Input::Cr(t));
            names.push(InputKind::Cr.section());
        }
        let accepted: Vec<&str> = command.accepted_inputs().iter().map(|k| k.section()).collect();
        if present.len() != 1 {
            return Err(CliError::Config(format!(
                "command {command} needs exactly one input section ([{}]); found {}",
                accepted.join("] or ["),
                if names.is_empty() { "none".to_string() } else { names.join(", ") }
            )));
        }
        if !accepted.contains(&names[0]) {
            return Err(CliError::Config(format!(
                "command {command} does not accept a [{}] section (expected [{}])",
                names[0],
                accepted.join("] or [")
            )));
        }
        let input = present.pop().expect("one input");
        Ok(RunConfig { command, dimension: raw.dimension, x_order, rho_order, mode, tolerance, input, expect: raw.expect })
    }
}
