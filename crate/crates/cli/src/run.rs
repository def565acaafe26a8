//! Kinematics, packet and bands shared by the subcommands, plus artifact
//! writing.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;

use semiclassical_core::elements::{BandMode, BandParams, ObservableBands};
use semiclassical_core::evolution::{time_grid, EnergyModel};
use semiclassical_core::landau::{
    anomalous_frequency, cyclotron_frequency, energy_spinor, AnomalousFrequency,
    CyclotronFrequency,
};
use semiclassical_core::packet::{
    constructive_a2, printed_a2, semiclassical_factor, PacketSpec, StructureSums,
};
use semiclassical_core::{Complex64, FieldConfig, ParticleKind, Sign, SpinKinematics};

use crate::config::{Mode, RunConfig};
use crate::failure::Failure;

/// Kinematic frame of one run.
#[derive(Clone, Debug)]
pub struct Setup {
    pub cfg: FieldConfig,
    /// Kinematics of the bands and the packet.
    pub kin: SpinKinematics,
    /// `B_{nζ} → γ` kinematics of the classical reference.
    pub classical: SpinKinematics,
    pub model: EnergyModel,
    /// Frequencies of the closed forms in this mode.
    pub omega: f64,
    pub omega_a: f64,
    /// `2h/γ` and `2·anomaly·h·b/γ`.
    pub classical_omega: f64,
    pub classical_omega_a: f64,
    pub band_mode: BandMode,
}

impl Setup {
    pub fn new(rc: &RunConfig) -> Result<Self, Failure> {
        let cfg = FieldConfig::new(rc.h, rc.anomaly, rc.b_z)?;
        let classical = SpinKinematics::bmt_limit(&cfg, rc.n, rc.epsilon)?;
        let gamma = classical.energy;
        let classical_omega = 2.0 * cfg.h() / gamma;
        let classical_omega_a = 2.0 * cfg.anomalous_coupling() * classical.b / gamma;
        let (kin, model, omega, omega_a) = match rc.mode {
            Mode::UniformGap => (
                classical,
                EnergyModel::UniformGap {
                    omega: classical_omega,
                    omega_a: classical_omega_a,
                },
                classical_omega,
                classical_omega_a,
            ),
            Mode::Exact => {
                let kin = SpinKinematics::new(&cfg, rc.n, rc.epsilon)?;
                let omega = cyclotron_frequency(&cfg, rc.n, rc.epsilon, ParticleKind::Spinor)?.exact;
                let omega_a = anomalous_frequency(&cfg, rc.n)?.exact;
                (kin, EnergyModel::Exact(cfg), omega, omega_a)
            }
        };
        let band_mode = if rc.per_level_bands {
            BandMode::PerLevel { cfg, zeta_ref: rc.epsilon }
        } else {
            BandMode::Frozen
        };
        Ok(Setup {
            cfg,
            kin,
            classical,
            model,
            omega,
            omega_a,
            classical_omega,
            classical_omega_a,
            band_mode,
        })
    }

    pub fn packet(&self, rc: &RunConfig, levels: u32) -> Result<PacketSpec, Failure> {
        let p = PacketSpec::from_kinematics(rc.n, levels, &self.kin)?;
        if rc.phase_noise > 0.0 {
            Ok(p.with_random_phases(rc.seed, rc.phase_noise)?)
        } else {
            Ok(p)
        }
    }

    pub fn bands(&self, packet: &PacketSpec) -> Result<ObservableBands, Failure> {
        Ok(ObservableBands::build(
            packet.levels(),
            ParticleKind::Spinor,
            &BandParams::from_kinematics(&self.kin),
            self.band_mode,
        )?)
    }

    /// The configured grid, or two cyclotron periods.
    pub fn times(&self, rc: &RunConfig) -> Result<Vec<f64>, Failure> {
        let t_max = rc.t_max.unwrap_or(4.0 * PI / self.omega);
        Ok(time_grid(t_max, rc.samples)?)
    }
}

#[derive(Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize)]
pub struct Sums {
    pub a1: ComplexValue,
    pub a2: ComplexValue,
    pub a3: ComplexValue,
    pub a4: ComplexValue,
    /// `((N−1)/N)κ/(κ+1)` as printed.
    pub a2_printed: f64,
    /// `((N−1)/N)κ/(κ²+1)` from the construction.
    pub a2_constructive: f64,
}

impl Sums {
    pub fn of(packet: &PacketSpec) -> Option<Self> {
        let c = |z: Complex64| ComplexValue { re: z.re, im: z.im };
        let kappa = packet.kappa()?;
        let levels = packet.levels().count();
        match packet.structure_sums() {
            StructureSums::Spinor { a1, a2, a3, a4 } => Some(Sums {
                a1: c(a1),
                a2: c(a2),
                a3: c(a3),
                a4: c(a4),
                a2_printed: printed_a2(levels, kappa),
                a2_constructive: constructive_a2(levels, kappa),
            }),
            StructureSums::Scalar { .. } => None,
        }
    }
}

#[derive(Serialize)]
pub struct Derived {
    pub b_perp: f64,
    pub b: f64,
    pub energy_plus: f64,
    pub energy_minus: f64,
    /// Energy entering the bands and `P⁰`.
    pub energy: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub zeta_perp: f64,
    pub zeta_z: f64,
    pub semiclassical_factor: f64,
    pub omega: CyclotronFrequency,
    pub omega_a: AnomalousFrequency,
    pub model_omega: f64,
    pub model_omega_a: f64,
    pub classical_omega: f64,
    pub classical_omega_a: f64,
    pub structure_sums: Option<Sums>,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub timestamp_unix: u64,
    pub config: &'a RunConfig,
    pub derived: Derived,
    pub packet: Option<&'a PacketSpec>,
}

pub fn derived(rc: &RunConfig, setup: &Setup, packet: Option<&PacketSpec>) -> Result<Derived, Failure> {
    let cfg = &setup.cfg;
    Ok(Derived {
        b_perp: setup.kin.b_perp,
        b: setup.kin.b,
        energy_plus: energy_spinor(cfg, rc.n, Sign::Plus),
        energy_minus: energy_spinor(cfg, rc.n, Sign::Minus),
        energy: setup.kin.energy,
        gamma: setup.classical.energy,
        kappa: setup.kin.kappa,
        zeta_perp: setup.kin.zeta_perp,
        zeta_z: setup.kin.zeta_z,
        semiclassical_factor: semiclassical_factor(rc.levels),
        omega: cyclotron_frequency(cfg, rc.n, rc.epsilon, ParticleKind::Spinor)?,
        omega_a: anomalous_frequency(cfg, rc.n)?,
        model_omega: setup.omega,
        model_omega_a: setup.omega_a,
        classical_omega: setup.classical_omega,
        classical_omega_a: setup.classical_omega_a,
        structure_sums: packet.and_then(Sums::of),
    })
}

pub fn manifest<'a>(
    command: &'a str,
    rc: &'a RunConfig,
    setup: &Setup,
    packet: Option<&'a PacketSpec>,
) -> Result<Manifest<'a>, Failure> {
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(Manifest {
        tool: "semiclassical",
        version: env!("CARGO_PKG_VERSION"),
        command,
        timestamp_unix,
        config: rc,
        derived: derived(rc, setup, packet)?,
        packet,
    })
}

pub fn output_dir(rc: &RunConfig) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(&rc.output_dir).map_err(|e| {
        Failure::Io(format!("cannot create output directory {}: {e}", rc.output_dir.display()))
    })?;
    Ok(rc.output_dir.clone())
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Io(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_text(dir, name, &text)
}
