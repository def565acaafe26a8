//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;

use semiclassical_core::Sign;

use crate::failure::Failure;

pub const OUTPUT_DIR_ENV: &str = "SEMICLASSICAL_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "semiclassical-output";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    UniformGap,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::from_str_opt(s).ok_or_else(|| format!("expected exact or uniform-gap, got '{s}'"))
    }
}

impl Mode {
    fn from_str_opt(s: &str) -> Option<Self> {
        match s.trim() {
            "exact" => Some(Mode::Exact),
            "uniform-gap" | "uniform_gap" => Some(Mode::UniformGap),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::UniformGap => "uniform-gap",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub h: f64,
    pub anomaly: f64,
    pub b_z: f64,
    pub n: u32,
    pub levels: u32,
    pub epsilon: Sign,
    pub mode: Mode,
    /// `None` selects two cyclotron periods.
    pub t_max: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Random level phases in `[−π·noise, π·noise]`; 0 keeps equal phases.
    pub phase_noise: f64,
    pub per_level_bands: bool,
    pub steps_per_period: u32,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            h: 0.1,
            anomaly: semiclassical_core::landau::ALPHA_OVER_TWO_PI,
            b_z: 0.5,
            n: 1000,
            levels: 3,
            epsilon: Sign::Plus,
            mode: Mode::UniformGap,
            t_max: None,
            samples: 256,
            seed: 0,
            phase_noise: 0.0,
            per_level_bands: false,
            steps_per_period: semiclassical_core::classical::DEFAULT_STEPS_PER_PERIOD,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// Flat key=value configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Dimensionless field μ₀H/(m₀c²).
    #[arg(long)]
    pub h: Option<f64>,
    /// Anomalous moment factor (α/2π for the electron).
    #[arg(long)]
    pub anomaly: Option<f64>,
    /// Longitudinal momentum p_z/(m₀c).
    #[arg(long = "b-z", allow_hyphen_values = true)]
    pub b_z: Option<f64>,
    /// Reference Landau level.
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of levels in the packet.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Helicity sign, +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<i64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// End of the time grid in units ħ/(m₀c²).
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "phase-noise")]
    pub phase_noise: Option<f64>,
    /// Re-evaluate b_⊥, b and B per level pair inside the bands.
    #[arg(long = "per-level-bands", num_args = 0..=1, default_missing_value = "true")]
    pub per_level_bands: Option<bool>,
    /// RK4 steps per cyclotron period of the classical reference.
    #[arg(long = "steps-per-period")]
    pub steps_per_period: Option<u32>,
    /// Output directory (default: $SEMICLASSICAL_OUTPUT_DIR, else ./semiclassical-output).
    #[arg(long = "output-dir", value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, Failure>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Failure::Config(format!("invalid value for '{key}': '{}' ({e})", value.trim())))
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), Failure> {
    match key {
        "h" => cfg.h = parse(key, value)?,
        "anomaly" => cfg.anomaly = parse(key, value)?,
        "b_z" => cfg.b_z = parse(key, value)?,
        "n" => cfg.n = parse(key, value)?,
        "levels" => cfg.levels = parse(key, value)?,
        "epsilon" => cfg.epsilon = sign(parse(key, value)?)?,
        "mode" => cfg.mode = parse(key, value)?,
        "t_max" => cfg.t_max = Some(parse(key, value)?),
        "samples" => cfg.samples = parse(key, value)?,
        "seed" => cfg.seed = parse(key, value)?,
        "phase_noise" => cfg.phase_noise = parse(key, value)?,
        "per_level_bands" => cfg.per_level_bands = parse(key, value)?,
        "steps_per_period" => cfg.steps_per_period = parse(key, value)?,
        "output_dir" => cfg.output_dir = PathBuf::from(value.trim()),
        other => return Err(Failure::Config(format!("unknown configuration key '{other}'"))),
    }
    Ok(())
}

fn sign(v: i64) -> Result<Sign, Failure> {
    Sign::from_i64(v).map_err(|_| Failure::Config(format!("epsilon must be +1 or -1, got {v}")))
}

/// Applies `key = value` lines; `#` starts a comment.
pub fn apply_file_text(cfg: &mut RunConfig, text: &str, origin: &Path) -> Result<(), Failure> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Config(format!("{}:{}: expected key = value", origin.display(), i + 1))
        })?;
        let key = key.trim().replace('-', "_");
        apply(cfg, &key, value).map_err(|e| match e {
            Failure::Config(msg) => Failure::Config(format!("{}:{}: {msg}", origin.display(), i + 1)),
            other => other,
        })?;
    }
    Ok(())
}

impl ConfigArgs {
    /// Defaults, then the environment output root, then the file, then
    /// flags; validated.
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig::default();
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            cfg.output_dir = PathBuf::from(dir);
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Config(format!("cannot read config file {}: {e}", path.display()))
            })?;
            apply_file_text(&mut cfg, &text, path)?;
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            };
        }
        take!(h);
        take!(anomaly);
        take!(b_z);
        take!(n);
        take!(levels);
        take!(mode);
        take!(samples);
        take!(seed);
        take!(phase_noise);
        take!(per_level_bands);
        take!(steps_per_period);
        take!(output_dir);
        if let Some(e) = self.epsilon {
            cfg.epsilon = sign(e)?;
        }
        if self.t_max.is_some() {
            cfg.t_max = self.t_max;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |field: &str, msg: String| Err(Failure::Config(format!("{field}: {msg}")));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad("h", format!("must be finite and > 0 (b_perp = 0 leaves kappa undefined), got {}", self.h));
        }
        if !(self.anomaly.is_finite() && self.anomaly >= 0.0) {
            return bad("anomaly", format!("must be finite and >= 0, got {}", self.anomaly));
        }
        if !self.b_z.is_finite() {
            return bad("b_z", format!("must be finite, got {}", self.b_z));
        }
        if self.n == 0 {
            return bad("n", "must be >= 1".into());
        }
        if self.levels == 0 {
            return bad("levels", "must be >= 1".into());
        }
        if self.n <= (self.levels - 1) / 2 {
            return bad(
                "levels",
                format!("{} levels around n={} would include m=0", self.levels, self.n),
            );
        }
        if self.samples < 2 {
            return bad("samples", format!("must be >= 2, got {}", self.samples));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return bad("t_max", format!("must be finite and > 0, got {t}"));
            }
        }
        if !(self.phase_noise.is_finite() && self.phase_noise >= 0.0) {
            return bad("phase_noise", format!("must be >= 0, got {}", self.phase_noise));
        }
        if f64::from(self.steps_per_period) < semiclassical_core::classical::MIN_STEPS_PER_PERIOD {
            return bad(
                "steps_per_period",
                format!(
                    "must be >= {}, got {}",
                    semiclassical_core::classical::MIN_STEPS_PER_PERIOD,
                    self.steps_per_period
                ),
            );
        }
        Ok(())
    }
}
