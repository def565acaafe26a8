//! Expectation values of wave packets in time.
//!
//! The generic engine evaluates
//! `⟨O⟩_t = Σ A*_{row} A_{col} e^{i(E_row − E_col)t} O_{row,col}`
//! over a band. The closed forms are the same sums reduced analytically
//! for equal-phase packets in the uniform-gap model.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::elements::{BasisState, ObservableBands, OperatorBand};
use crate::error::{Error, Result};
use crate::landau::{FieldConfig, ParticleKind, SpinKinematics};
use crate::packet::{semiclassical_factor, PacketSpec};
use crate::trajectory::{minkowski, FourVector, Residuals, Tensor, Trajectory};

/// Largest imaginary part tolerated on a Hermitian expectation value.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub enum EnergyModel {
    /// True level energies `B_m` or `B_{mζ}`.
    Exact(FieldConfig),
    /// Every adjacent gap equal to `omega` and every ζ-splitting equal to
    /// `omega_a`.
    UniformGap { omega: f64, omega_a: f64 },
}

impl EnergyModel {
    /// `E_row − E_col`.
    pub fn gap(&self, kind: ParticleKind, row: BasisState, col: BasisState) -> f64 {
        let dm = f64::from(row.m) - f64::from(col.m);
        let zeta = |s: BasisState| s.zeta.map_or(0.0, |z| z.value());
        match *self {
            EnergyModel::UniformGap { omega, omega_a } => {
                dm * omega + 0.5 * (zeta(row) - zeta(col)) * omega_a
            }
            EnergyModel::Exact(cfg) => exact_gap(&cfg, kind, row, col),
        }
    }
}

/// Energy difference from `(B₁² − B₀²)/(B₁ + B₀)` with the squared
/// difference factored, so adjacent gaps keep full relative precision at
/// large `m`.
fn exact_gap(cfg: &FieldConfig, kind: ParticleKind, row: BasisState, col: BasisState) -> f64 {
    let h = cfg.h();
    let dm = f64::from(row.m) - f64::from(col.m);
    match kind {
        ParticleKind::Scalar => {
            let e1 = crate::landau::energy_scalar(cfg, row.m);
            let e0 = crate::landau::energy_scalar(cfg, col.m);
            4.0 * h * dm / (e1 + e0)
        }
        ParticleKind::Spinor => {
            let z1 = row.zeta.map_or(0.0, |z| z.value());
            let z0 = col.zeta.map_or(0.0, |z| z.value());
            let mu = cfg.anomalous_coupling();
            let b1 = (1.0 + 4.0 * h * f64::from(row.m)).sqrt();
            let b0 = (1.0 + 4.0 * h * f64::from(col.m)).sqrt();
            let t1 = b1 + z1 * mu;
            let t0 = b0 + z0 * mu;
            let e1 = cfg.b_z().hypot(t1);
            let e0 = cfg.b_z().hypot(t0);
            let db = 4.0 * h * dm / (b1 + b0);
            (db + (z1 - z0) * mu) * (t1 + t0) / (e1 + e0)
        }
    }
}

/// A packet–band pair flattened to `Σ c_k e^{iΔ_k t}`.
#[derive(Clone, Debug)]
pub struct Expectation {
    terms: Vec<(Complex64, f64)>,
}

impl Expectation {
    pub fn new(packet: &PacketSpec, band: &OperatorBand, model: &EnergyModel) -> Result<Self> {
        if packet.levels() != band.levels() || packet.kind() != band.kind() {
            return Err(Error::domain(format!(
                "packet {:?} {:?} and band {:?} {:?} use different bases",
                packet.kind(),
                packet.levels(),
                band.kind(),
                band.levels()
            )));
        }
        let kind = packet.kind();
        let terms = band
            .entries()
            .filter_map(|(row, col, v)| {
                let c = packet.amplitude(row).conj() * packet.amplitude(col) * v;
                (c != Complex64::new(0.0, 0.0)).then(|| (c, model.gap(kind, row, col)))
            })
            .collect();
        Ok(Expectation { terms })
    }

    /// The complex double sum at time `t`.
    pub fn at(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(c, w)| c * Complex64::from_polar(1.0, w * t))
            .sum()
    }

    /// The sum at `t` with the imaginary residue gated and dropped.
    pub fn real_at(&self, t: f64) -> Result<f64> {
        real_part(self.at(t))
    }

    /// Real values on a grid, evaluated in parallel, in grid order.
    pub fn real_on(&self, times: &[f64]) -> Result<Vec<f64>> {
        times.par_iter().map(|&t| self.real_at(t)).collect()
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

pub fn generic_expectation(
    packet: &PacketSpec,
    band: &OperatorBand,
    model: &EnergyModel,
    t: f64,
) -> Result<Complex64> {
    Ok(Expectation::new(packet, band, model)?.at(t))
}

pub fn real_expectation(
    packet: &PacketSpec,
    band: &OperatorBand,
    model: &EnergyModel,
    t: f64,
) -> Result<f64> {
    real_part(generic_expectation(packet, band, model, t)?)
}

/// `t_k = k·t_max/samples`, `k = 0..samples` (endpoint excluded).
pub fn time_grid(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {samples}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be positive, got {t_max}")));
    }
    let dt = t_max / samples as f64;
    Ok((0..samples).map(|k| k as f64 * dt).collect())
}

/// Trajectory of `P` (and `S` for spinors) computed by the generic engine.
/// `P⁰` is the band energy.
pub fn quantum_trajectory(
    packet: &PacketSpec,
    bands: &ObservableBands,
    model: &EnergyModel,
    times: &[f64],
) -> Result<Trajectory> {
    let energy = bands.px.params().energy;
    let px = Expectation::new(packet, &bands.px, model)?.real_on(times)?;
    let py = Expectation::new(packet, &bands.py, model)?.real_on(times)?;
    let pz = Expectation::new(packet, &bands.pz, model)?.real_on(times)?;
    let momentum = (0..times.len())
        .map(|k| [energy, px[k], py[k], pz[k]])
        .collect();
    let spin = match &bands.spin {
        None => None,
        Some(spin_bands) => {
            let comps = spin_bands
                .iter()
                .map(|b| Expectation::new(packet, b, model)?.real_on(times))
                .collect::<Result<Vec<_>>>()?;
            Some(
                (0..times.len())
                    .map(|k| [comps[0][k], comps[1][k], comps[2][k], comps[3][k]])
                    .collect(),
            )
        }
    };
    Trajectory::new(times.to_vec(), momentum, spin)
}

/// `(−f b_⊥ sin ωt, f b_⊥ cos ωt, b_z)` with `f = (N−1)/N`.
pub fn closed_form_momentum(b_perp: f64, b_z: f64, levels: u32, omega: f64, t: f64) -> [f64; 3] {
    closed_form_momentum_with_factor(b_perp, b_z, semiclassical_factor(levels), omega, t)
}

pub fn closed_form_momentum_with_factor(b_perp: f64, b_z: f64, f: f64, omega: f64, t: f64) -> [f64; 3] {
    let (s, c) = (omega * t).sin_cos();
    [-f * b_perp * s, f * b_perp * c, b_z]
}

/// `(S⁰, S_x, S_y, S_z)` of an `N`-level longitudinally polarized packet.
pub fn closed_form_spin(k: &SpinKinematics, levels: u32, omega: f64, omega_a: f64, t: f64) -> FourVector {
    closed_form_spin_with_factor(k, semiclassical_factor(levels), omega, omega_a, t)
}

pub fn closed_form_spin_with_factor(
    k: &SpinKinematics,
    f: f64,
    omega: f64,
    omega_a: f64,
    t: f64,
) -> FourVector {
    let (sw, cw) = (omega * t).sin_cos();
    let (sa, ca) = (omega_a * t).sin_cos();
    let zp = k.zeta_perp;
    let zz = k.zeta_z;
    [
        k.b_z / k.b * zz + k.energy * k.b_perp / k.b * zp * ca,
        -f * zp * (cw * sa + k.b * sw * ca),
        -f * zp * (sw * sa - k.b * cw * ca),
        k.energy / k.b * zz + k.b_z * k.b_perp / k.b * zp * ca,
    ]
}

/// Closed-form trajectory with `P⁰ = B`.
pub fn closed_form_trajectory(
    k: &SpinKinematics,
    f: f64,
    omega: f64,
    omega_a: f64,
    times: &[f64],
) -> Result<Trajectory> {
    let momentum = times
        .iter()
        .map(|&t| {
            let p = closed_form_momentum_with_factor(k.b_perp, k.b_z, f, omega, t);
            [k.energy, p[0], p[1], p[2]]
        })
        .collect();
    let spin = times
        .iter()
        .map(|&t| closed_form_spin_with_factor(k, f, omega, omega_a, t))
        .collect();
    Trajectory::new(times.to_vec(), momentum, Some(spin))
}

fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut p = idx;
    let mut sign = 1.0;
    for i in 0..4 {
        while p[i] != i {
            let j = p[i];
            if p[j] == j {
                return 0.0;
            }
            p.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

fn lower(v: &FourVector) -> FourVector {
    [v[0], -v[1], -v[2], -v[3]]
}

/// `Π^{μν} = ε^{μναβ} S_α P_β`, `ε^{0123} = +1`.
pub fn polarization_tensor(s: &FourVector, p: &FourVector) -> Tensor {
    let (sl, pl) = (lower(s), lower(p));
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    let e = levi_civita([mu, nu, a, b]);
                    if e != 0.0 {
                        acc += e * sl[a] * pl[b];
                    }
                }
            }
            out[mu][nu] = acc;
        }
    }
    out
}

/// `max |Π + Πᵀ|` and `max_μ |Π^{μν} P_ν|`.
pub fn tensor_defects(pi: &Tensor, p: &FourVector) -> (f64, f64) {
    let pl = lower(p);
    let mut antisym = 0.0f64;
    let mut transverse = 0.0f64;
    for mu in 0..4 {
        let mut contraction = 0.0;
        for nu in 0..4 {
            antisym = antisym.max((pi[mu][nu] + pi[nu][mu]).abs());
            contraction += pi[mu][nu] * pl[nu];
        }
        transverse = transverse.max(contraction.abs());
    }
    (antisym, transverse)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub max_r1: f64,
    pub max_r2: f64,
    /// Spread of `|⟨P⟩_⊥|` over the samples.
    pub transverse_defect: f64,
    pub longitudinal_defect: f64,
}

pub fn invariant_report(traj: &Trajectory) -> Result<InvariantReport> {
    let res: &[Residuals] = traj
        .residuals()
        .ok_or_else(|| Error::domain("invariant report needs a spin trajectory"))?;
    let r1: Vec<f64> = res.iter().map(|r| r.sp).collect();
    let r2: Vec<f64> = res.iter().map(|r| r.ss).collect();
    Ok(InvariantReport {
        max_r1: r1.iter().copied().fold(0.0, f64::max),
        max_r2: r2.iter().copied().fold(0.0, f64::max),
        r1,
        r2,
        transverse_defect: traj.transverse_defect(),
        longitudinal_defect: traj.longitudinal_defect(),
    })
}

/// `S·P` for a single pair, exposed for spot checks.
pub fn spin_momentum_product(s: &FourVector, p: &FourVector) -> f64 {
    minkowski(s, p)
}
