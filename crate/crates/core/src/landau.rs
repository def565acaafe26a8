//! Landau-level kinematics for scalar (Klein-Gordon) and spinor
//! (Dirac-Pauli) particles in a homogeneous magnetic field along z.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// α/2π, the leading anomalous part of the electron magnetic moment.
pub const ALPHA_OVER_TWO_PI: f64 = 1.161_409_73e-3;

/// A ±1 label, used both for the spin quantum number ζ and the helicity
/// sign ε.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::domain(format!("expected ±1, got {other}"))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_i64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticleKind {
    Scalar,
    Spinor,
}

/// Labels of a stationary Landau state: principal `n`, radial `s`,
/// azimuthal `l = n - s` and, for spinors, the spin number ζ.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    n: u32,
    s: u32,
    l: i64,
    zeta: Option<Sign>,
}

impl QuantumNumbers {
    pub fn new(n: u32, s: u32, zeta: Option<Sign>) -> Self {
        QuantumNumbers {
            n,
            s,
            l: i64::from(n) - i64::from(s),
            zeta,
        }
    }

    pub fn scalar(n: u32, s: u32) -> Self {
        Self::new(n, s, None)
    }

    /// Checked constructor from all three orbital labels.
    pub fn from_labels(n: u32, s: u32, l: i64, zeta: Option<Sign>) -> Result<Self> {
        if i64::from(n) != l + i64::from(s) {
            return Err(Error::domain(format!(
                "quantum numbers violate n = l + s (n={n}, s={s}, l={l})"
            )));
        }
        Ok(QuantumNumbers { n, s, l, zeta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn zeta(&self) -> Option<Sign> {
        self.zeta
    }
}

/// Global run parameters: field `h = μ₀H/(m₀c²)`, anomaly factor
/// (μ_a = anomaly·μ₀) and longitudinal momentum `b_z = p_z/(m₀c)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct FieldConfig {
    h: f64,
    anomaly: f64,
    b_z: f64,
}

impl FieldConfig {
    pub fn new(h: f64, anomaly: f64, b_z: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::domain(format!("field h must be finite and >= 0, got {h}")));
        }
        if !(anomaly.is_finite() && anomaly >= 0.0) {
            return Err(Error::domain(format!(
                "anomaly must be finite and >= 0, got {anomaly}"
            )));
        }
        if !b_z.is_finite() {
            return Err(Error::domain(format!("b_z must be finite, got {b_z}")));
        }
        Ok(FieldConfig { h, anomaly, b_z })
    }

    /// Electron anomaly α/2π.
    pub fn electron(h: f64, b_z: f64) -> Result<Self> {
        Self::new(h, ALPHA_OVER_TWO_PI, b_z)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn anomaly(&self) -> f64 {
        self.anomaly
    }

    pub fn b_z(&self) -> f64 {
        self.b_z
    }

    /// μ_aH/(m₀c²).
    pub fn anomalous_coupling(&self) -> f64 {
        self.anomaly * self.h
    }

    pub fn with_anomaly(&self, anomaly: f64) -> Result<Self> {
        Self::new(self.h, anomaly, self.b_z)
    }
}

/// `b_⊥` of level `n`: `2√(h(n+½))` for scalars, `2√(hn)` for spinors.
pub fn transverse_momentum(h: f64, n: u32, kind: ParticleKind) -> Result<f64> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("field h must be finite and >= 0, got {h}")));
    }
    Ok(transverse_momentum_unchecked(h, n, kind))
}

fn transverse_momentum_unchecked(h: f64, n: u32, kind: ParticleKind) -> f64 {
    let level = match kind {
        ParticleKind::Scalar => f64::from(n) + 0.5,
        ParticleKind::Spinor => f64::from(n),
    };
    2.0 * (h * level).sqrt()
}

/// `b = √(1 + b_⊥²)` for a spinor level.
fn spinor_b(cfg: &FieldConfig, n: u32) -> f64 {
    (1.0 + 4.0 * cfg.h * f64::from(n)).sqrt()
}

/// `B_n = √(1 + b_z² + b_⊥²)` of a Klein-Gordon level.
pub fn energy_scalar(cfg: &FieldConfig, n: u32) -> f64 {
    (1.0 + cfg.b_z * cfg.b_z + 4.0 * cfg.h * (f64::from(n) + 0.5)).sqrt()
}

/// `B_{nζ} = √(b_z² + (√(1+b_⊥²) + ζ·anomaly·h)²)` of a Dirac-Pauli level.
pub fn energy_spinor(cfg: &FieldConfig, n: u32, zeta: Sign) -> f64 {
    let t = spinor_b(cfg, n) + zeta.value() * cfg.anomalous_coupling();
    cfg.b_z.hypot(t)
}

/// `λ = ε√(b_⊥² + b_z²)`, eigenvalue of σ·P on a longitudinally polarized
/// level.
pub fn helicity_eigenvalue(b_perp: f64, b_z: f64, epsilon: Sign) -> f64 {
    epsilon.value() * b_perp.hypot(b_z)
}

/// Ratio `κ = A_{+1,m}/A_{-1,m}` of a longitudinally polarized packet,
/// evaluated with the energy of spin branch `zeta_ref`.
pub fn kappa(cfg: &FieldConfig, n: u32, zeta_ref: Sign, epsilon: Sign) -> Result<f64> {
    let b_perp = transverse_momentum_unchecked(cfg.h, n, ParticleKind::Spinor);
    if b_perp == 0.0 {
        return Err(Error::Singular(format!(
            "b_perp = 0 at n={n}, h={}: purely longitudinal motion, kappa undefined",
            cfg.h
        )));
    }
    let b = spinor_b(cfg, n);
    let energy = energy_spinor(cfg, n, zeta_ref);
    Ok(kappa_from_parts(b_perp, b, cfg.b_z, energy, epsilon))
}

fn kappa_from_parts(b_perp: f64, b: f64, b_z: f64, energy: f64, epsilon: Sign) -> f64 {
    (b_z + epsilon.value() * b * b_perp.hypot(b_z)) / (energy * b_perp)
}

/// `(ζ_⊥, ζ_z) = (2κ/(κ²+1), (κ²−1)/(κ²+1))`.
pub fn polarization_constants(kappa: f64) -> (f64, f64) {
    let k2 = kappa * kappa;
    let denom = k2 + 1.0;
    (2.0 * kappa / denom, (k2 - 1.0) / denom)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct CyclotronFrequency {
    /// Adjacent-level gap `B_{n+1} − B_n`.
    pub exact: f64,
    /// `2h/B_n`, the relativistic cyclotron frequency in these units.
    pub asymptotic: f64,
}

impl CyclotronFrequency {
    pub fn relative_gap(&self) -> f64 {
        if self.asymptotic == 0.0 {
            0.0
        } else {
            ((self.exact - self.asymptotic) / self.asymptotic).abs()
        }
    }
}

pub fn cyclotron_frequency(
    cfg: &FieldConfig,
    n: u32,
    zeta: Sign,
    kind: ParticleKind,
) -> Result<CyclotronFrequency> {
    let n1 = n
        .checked_add(1)
        .ok_or_else(|| Error::domain("level index overflow"))?;
    let (lower, exact) = match kind {
        ParticleKind::Scalar => {
            let lo = energy_scalar(cfg, n);
            let hi = energy_scalar(cfg, n1);
            // B_{n+1}² − B_n² = 4h
            (lo, 4.0 * cfg.h / (lo + hi))
        }
        ParticleKind::Spinor => {
            if n == 0 {
                return Err(Error::domain("spinor cyclotron frequency requires n >= 1"));
            }
            let lo = energy_spinor(cfg, n, zeta);
            let hi = energy_spinor(cfg, n1, zeta);
            let (b0, b1) = (spinor_b(cfg, n), spinor_b(cfg, n1));
            let db = 4.0 * cfg.h / (b0 + b1);
            let shift = zeta.value() * cfg.anomalous_coupling();
            (lo, db * (b0 + b1 + 2.0 * shift) / (lo + hi))
        }
    };
    Ok(CyclotronFrequency {
        exact,
        asymptotic: 2.0 * cfg.h / lower,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct AnomalousFrequency {
    /// `B_{n,+1} − B_{n,−1}`.
    pub exact: f64,
    /// `2·anomaly·h·b/√(b_z² + b²)`.
    pub closed: f64,
}

pub fn anomalous_frequency(cfg: &FieldConfig, n: u32) -> Result<AnomalousFrequency> {
    if n == 0 {
        return Err(Error::domain("anomalous frequency requires n >= 1"));
    }
    let b = spinor_b(cfg, n);
    let coupling = cfg.anomalous_coupling();
    let up = energy_spinor(cfg, n, Sign::Plus);
    let down = energy_spinor(cfg, n, Sign::Minus);
    // (b+μ)² − (b−μ)² = 4bμ
    let exact = 4.0 * b * coupling / (up + down);
    let closed = 2.0 * coupling * b / cfg.b_z.hypot(b);
    Ok(AnomalousFrequency { exact, closed })
}

/// Frozen kinematics of the reference level of a spinor packet.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct SpinKinematics {
    pub b_perp: f64,
    pub b: f64,
    pub b_z: f64,
    /// Level energy `B` used in the spin matrix elements and as `P⁰`.
    pub energy: f64,
    pub kappa: f64,
    pub zeta_perp: f64,
    pub zeta_z: f64,
    pub epsilon: Sign,
}

impl SpinKinematics {
    /// Reference level `n` with the energy of spin branch ζ = ε.
    pub fn new(cfg: &FieldConfig, n: u32, epsilon: Sign) -> Result<Self> {
        Self::with_reference(cfg, n, epsilon, epsilon)
    }

    pub fn with_reference(cfg: &FieldConfig, n: u32, zeta_ref: Sign, epsilon: Sign) -> Result<Self> {
        let b_perp = transverse_momentum_unchecked(cfg.h, n, ParticleKind::Spinor);
        let energy = energy_spinor(cfg, n, zeta_ref);
        if b_perp == 0.0 {
            // surface the same error as `kappa`
            kappa(cfg, n, zeta_ref, epsilon)?;
        }
        Self::from_parts(b_perp, cfg.b_z, energy, epsilon)
    }

    /// The B_{nζ} → γ limit: energy `√(b² + b_z²)` without the anomalous
    /// shift. This is the kinematics of the classical BMT reference.
    pub fn bmt_limit(cfg: &FieldConfig, n: u32, epsilon: Sign) -> Result<Self> {
        let b_perp = transverse_momentum_unchecked(cfg.h, n, ParticleKind::Spinor);
        let gamma = cfg.b_z.hypot(spinor_b(cfg, n));
        Self::from_parts(b_perp, cfg.b_z, gamma, epsilon)
    }

    pub fn from_parts(b_perp: f64, b_z: f64, energy: f64, epsilon: Sign) -> Result<Self> {
        if !(b_perp.is_finite() && b_perp > 0.0) {
            return Err(Error::Singular(format!(
                "b_perp = {b_perp}: purely longitudinal motion, kappa undefined"
            )));
        }
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::domain(format!("energy must be positive, got {energy}")));
        }
        let b = (1.0 + b_perp * b_perp).sqrt();
        let kappa = kappa_from_parts(b_perp, b, b_z, energy, epsilon);
        let (zeta_perp, zeta_z) = polarization_constants(kappa);
        Ok(SpinKinematics {
            b_perp,
            b,
            b_z,
            energy,
            kappa,
            zeta_perp,
            zeta_z,
            epsilon,
        })
    }

    pub fn helicity(&self) -> f64 {
        helicity_eigenvalue(self.b_perp, self.b_z, self.epsilon)
    }

    /// 𝔄₃ = κ/(κ²+1).
    pub fn a3(&self) -> f64 {
        self.kappa / (self.kappa * self.kappa + 1.0)
    }

    /// 𝔄₄ = (κ²−1)/(κ²+1).
    pub fn a4(&self) -> f64 {
        self.zeta_z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(h: f64, anomaly: f64, b_z: f64) -> FieldConfig {
        FieldConfig::new(h, anomaly, b_z).unwrap()
    }

    #[test]
    fn transverse_momentum_examples() {
        assert_eq!(transverse_momentum(0.0, 5, ParticleKind::Scalar).unwrap(), 0.0);
        assert_eq!(transverse_momentum(0.125, 0, ParticleKind::Scalar).unwrap(), 0.5);
        assert_eq!(transverse_momentum(0.25, 1, ParticleKind::Spinor).unwrap(), 1.0);
        assert!(matches!(
            transverse_momentum(-1.0, 1, ParticleKind::Scalar),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn field_config_rejects_bad_inputs() {
        assert!(FieldConfig::new(-0.1, 0.0, 0.0).is_err());
        assert!(FieldConfig::new(0.1, -1e-3, 0.0).is_err());
        assert!(FieldConfig::new(0.1, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn quantum_numbers_enforce_n_equals_l_plus_s() {
        let q = QuantumNumbers::scalar(5, 2);
        assert_eq!(q.l(), 3);
        assert!(QuantumNumbers::from_labels(5, 2, 2, None).is_err());
        let q = QuantumNumbers::from_labels(1, 3, -2, Some(Sign::Plus)).unwrap();
        assert_eq!(q.zeta(), Some(Sign::Plus));
    }

    #[test]
    fn scalar_energy_examples() {
        assert_eq!(energy_scalar(&cfg(0.0, 0.0, 0.0), 3), 1.0);
        assert_relative_eq!(energy_scalar(&cfg(0.0, 0.0, 3f64.sqrt()), 0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(energy_scalar(&cfg(0.125, 0.0, 0.0), 1), 1.75f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn spinor_energy_examples() {
        for zeta in Sign::BOTH {
            assert_eq!(energy_spinor(&cfg(0.0, 0.2, 0.0), 7, zeta), 1.0);
            assert_relative_eq!(
                energy_spinor(&cfg(0.25, 0.0, 0.0), 1, zeta),
                2f64.sqrt(),
                epsilon = 1e-15
            );
        }
        assert_relative_eq!(
            energy_spinor(&cfg(0.25, 0.2, 0.0), 1, Sign::Plus),
            2f64.sqrt() + 0.05,
            epsilon = 1e-15
        );
    }

    #[test]
    fn helicity_examples() {
        assert_eq!(helicity_eigenvalue(0.0, 0.0, Sign::Plus), 0.0);
        assert_eq!(helicity_eigenvalue(3.0, 4.0, Sign::Minus), -5.0);
        assert_eq!(helicity_eigenvalue(1.7, 0.0, Sign::Plus), 1.7);
    }

    #[test]
    fn kappa_symmetric_transverse_case_is_epsilon() {
        let c = cfg(0.3, 0.0, 0.0);
        for n in [1, 4, 100] {
            assert_relative_eq!(kappa(&c, n, Sign::Plus, Sign::Plus).unwrap(), 1.0, epsilon = 1e-14);
            assert_relative_eq!(
                kappa(&c, n, Sign::Minus, Sign::Minus).unwrap(),
                -1.0,
                epsilon = 1e-14
            );
        }
        let (zp, zz) = polarization_constants(1.0);
        assert_eq!((zp, zz), (1.0, 0.0));
    }

    #[test]
    fn kappa_is_singular_without_transverse_motion() {
        assert!(matches!(
            kappa(&cfg(0.0, 0.0, 1.0), 3, Sign::Plus, Sign::Plus),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            kappa(&cfg(0.1, 0.0, 1.0), 0, Sign::Plus, Sign::Plus),
            Err(Error::Singular(_))
        ));
        assert!(SpinKinematics::new(&cfg(0.1, 0.0, 1.0), 0, Sign::Plus).is_err());
    }

    /// Spin coefficients C₁..C₄ of a Dirac-Pauli level.
    fn spin_coefficients(zeta: f64, b_z: f64, energy: f64, b: f64) -> [f64; 4] {
        let p = (1.0 + b_z / energy).sqrt();
        let m = (1.0 - b_z / energy).sqrt();
        let up = (0.5 * (1.0 + zeta / b)).sqrt();
        let dn = (0.5 * (1.0 - zeta / b)).sqrt();
        [
            zeta / 2.0 * up * (p + zeta * m),
            zeta / 2.0 * dn * (m - zeta * p),
            zeta / 2.0 * up * (p - zeta * m),
            0.5 * dn * (p + zeta * m),
        ]
    }

    /// Projects σ·P (acting as [[b_z, b_⊥], [b_⊥, −b_z]] on each bispinor
    /// half in the C-basis) onto span{C(+1), C(−1)} and solves the 2×2
    /// eigenproblem. Returns (eigenvalue, A₊/A₋) for helicity `epsilon`.
    fn helicity_oracle(b_perp: f64, b_z: f64, epsilon: f64) -> (f64, f64) {
        let b = (1.0 + b_perp * b_perp).sqrt();
        let energy = (b * b + b_z * b_z).sqrt();
        let cp = spin_coefficients(1.0, b_z, energy, b);
        let cm = spin_coefficients(-1.0, b_z, energy, b);
        let apply = |c: &[f64; 4]| {
            [
                b_z * c[0] + b_perp * c[1],
                b_perp * c[0] - b_z * c[1],
                b_z * c[2] + b_perp * c[3],
                b_perp * c[2] - b_z * c[3],
            ]
        };
        let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (gpp, gpm, gmm) = (dot(&cp, &apply(&cp)), dot(&cp, &apply(&cm)), dot(&cm, &apply(&cm)));
        let mean = 0.5 * (gpp + gmm);
        let half = (0.5 * (gpp - gmm)).hypot(gpm);
        let lambda = mean + epsilon * half;
        // (G − λ) v = 0 → v = (gpm, λ − gpp)
        (lambda, gpm / (lambda - gpp))
    }

    #[test]
    fn kappa_matches_two_by_two_helicity_oracle() {
        // h = 0.25, n = 1 → b_⊥ = 1; then a sweep of other kinematics
        let mut cases = vec![(0.25, 1, 1.0)];
        cases.extend([(0.1, 5, 0.5), (0.3, 2, -0.7), (0.01, 40, 2.0), (1.0, 1, 0.0)]);
        for (h, n, b_z) in cases {
            let c = cfg(h, 0.0, b_z);
            let b_perp = transverse_momentum(h, n, ParticleKind::Spinor).unwrap();
            for eps in Sign::BOTH {
                let k = kappa(&c, n, eps, eps).unwrap();
                let (lambda, ratio) = helicity_oracle(b_perp, b_z, eps.value());
                assert_relative_eq!(lambda, helicity_eigenvalue(b_perp, b_z, eps), epsilon = 1e-12);
                // the R.5 phase convention carries an extra sign on ψ_{−1}
                assert_relative_eq!(ratio, -k, max_relative = 1e-10);
            }
        }
        // frozen value for the documented example: b_⊥ = 1, b_z = 1, ε = +1
        let k = kappa(&cfg(0.25, 0.0, 1.0), 1, Sign::Plus, Sign::Plus).unwrap();
        assert_relative_eq!(k, 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn polarization_constant_examples() {
        assert_eq!(polarization_constants(1.0), (1.0, 0.0));
        assert_eq!(polarization_constants(0.0), (0.0, -1.0));
        let (zp, zz) = polarization_constants(3.0);
        assert_relative_eq!(zp, 0.6, epsilon = 1e-15);
        assert_relative_eq!(zz, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn cyclotron_frequency_examples() {
        let f = cyclotron_frequency(&cfg(0.0, 0.0, 0.3), 4, Sign::Plus, ParticleKind::Scalar).unwrap();
        assert_eq!((f.exact, f.asymptotic), (0.0, 0.0));
        let f = cyclotron_frequency(&cfg(0.0, 0.1, 0.3), 4, Sign::Plus, ParticleKind::Spinor).unwrap();
        assert_eq!((f.exact, f.asymptotic), (0.0, 0.0));

        let h = 0.07;
        let n = 12;
        let f = cyclotron_frequency(&cfg(h, 0.0, 0.0), n, Sign::Plus, ParticleKind::Scalar).unwrap();
        let nf = f64::from(n);
        let lower = (1.0 + 4.0 * h * (nf + 0.5)).sqrt();
        let upper = (1.0 + 4.0 * h * (nf + 1.5)).sqrt();
        assert_relative_eq!(f.exact, upper - lower, max_relative = 1e-13);
        assert_relative_eq!(f.asymptotic, 2.0 * h / lower, max_relative = 1e-15);

        assert!(cyclotron_frequency(&cfg(0.1, 0.0, 0.0), 0, Sign::Plus, ParticleKind::Spinor).is_err());
    }

    #[test]
    fn spinor_gap_matches_direct_difference() {
        let c = cfg(0.2, 0.05, 0.4);
        for zeta in Sign::BOTH {
            let f = cyclotron_frequency(&c, 9, zeta, ParticleKind::Spinor).unwrap();
            let direct = energy_spinor(&c, 10, zeta) - energy_spinor(&c, 9, zeta);
            assert_relative_eq!(f.exact, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn cyclotron_gap_decays_as_one_over_n() {
        let c = cfg(0.1, 0.0, 0.5);
        let ns = [100u32, 1_000, 10_000];
        for kind in [ParticleKind::Scalar, ParticleKind::Spinor] {
            let gaps: Vec<f64> = ns
                .iter()
                .map(|&n| cyclotron_frequency(&c, n, Sign::Plus, kind).unwrap().relative_gap())
                .collect();
            let ratio = gaps[0] / gaps[1];
            assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
            let xs: Vec<f64> = ns.iter().map(|&n| f64::from(n)).collect();
            let slope = crate::fit::log_log_slope(&xs, &gaps).unwrap();
            assert!((slope + 1.0).abs() <= 0.1, "slope {slope}");
        }
    }

    #[test]
    fn anomalous_frequency_examples() {
        let f = anomalous_frequency(&cfg(0.3, 0.0, 0.5), 3).unwrap();
        assert_eq!((f.exact, f.closed), (0.0, 0.0));

        let f = anomalous_frequency(&cfg(0.3, 0.01, 0.0), 3).unwrap();
        assert_relative_eq!(f.closed, 2.0 * 0.01 * 0.3, max_relative = 1e-15);

        let f = anomalous_frequency(&cfg(1e-3, 0.00116, 0.5), 1_000_000).unwrap();
        assert!(((f.exact - f.closed) / f.closed).abs() < 1e-4);

        let c = cfg(0.2, 0.05, 0.3);
        let direct = energy_spinor(&c, 6, Sign::Plus) - energy_spinor(&c, 6, Sign::Minus);
        assert_relative_eq!(anomalous_frequency(&c, 6).unwrap().exact, direct, max_relative = 1e-12);
        assert!(anomalous_frequency(&c, 0).is_err());
    }

    #[test]
    fn anomalous_defect_is_cubic_in_anomaly() {
        let base = cfg(0.25, 0.0, 0.7);
        let defect = |a: f64| {
            let f = anomalous_frequency(&base.with_anomaly(a).unwrap(), 8).unwrap();
            (f.exact - f.closed).abs()
        };
        for a in [0.2, 0.1] {
            let ratio = defect(a) / defect(a / 2.0);
            // B₊ + B₋ is even in the anomaly
            assert!((ratio / 8.0 - 1.0).abs() < 0.05, "ratio {ratio} at anomaly {a}");
        }
    }

    #[test]
    fn bmt_limit_energy_is_anomaly_free() {
        let c = cfg(0.2, 0.1, 0.4);
        let k = SpinKinematics::bmt_limit(&c, 5, Sign::Plus).unwrap();
        assert_relative_eq!(k.energy * k.energy, k.b * k.b + k.b_z * k.b_z, max_relative = 1e-14);
        let q = SpinKinematics::new(&c, 5, Sign::Plus).unwrap();
        assert_relative_eq!(q.energy, energy_spinor(&c, 5, Sign::Plus), epsilon = 0.0);
    }

    proptest! {
        #[test]
        fn polarization_constants_are_unit(k in -1e3f64..1e3) {
            let (zp, zz) = polarization_constants(k);
            prop_assert!((zp * zp + zz * zz - 1.0).abs() < 1e-14);
            prop_assert!((zz - (k * k - 1.0) / (k * k + 1.0)).abs() < 1e-15);
        }

        #[test]
        fn zero_anomaly_energy_is_zeta_independent(h in 0.0f64..2.0, b_z in -3.0f64..3.0, n in 0u32..100_000) {
            let c = cfg(h, 0.0, b_z);
            let plus = energy_spinor(&c, n, Sign::Plus);
            let minus = energy_spinor(&c, n, Sign::Minus);
            let b_perp = transverse_momentum(h, n, ParticleKind::Spinor).unwrap();
            let direct = (1.0 + b_perp * b_perp + b_z * b_z).sqrt();
            prop_assert_eq!(plus, minus);
            prop_assert!((plus - direct).abs() <= 1e-12 * direct);
        }

        #[test]
        fn spinor_energy_ordering(h in 1e-4f64..1.0, a in 1e-4f64..0.1, b_z in -3.0f64..3.0, n in 0u32..1000) {
            let c = cfg(h, a, b_z);
            prop_assert!(energy_spinor(&c, n, Sign::Plus) >= energy_spinor(&c, n, Sign::Minus));
            prop_assert!(energy_spinor(&c, n, Sign::Minus) >= b_z.abs());
        }

        #[test]
        fn scalar_energy_increases_with_level(h in 1e-4f64..1.0, b_z in -3.0f64..3.0, n in 0u32..100_000) {
            let c = cfg(h, 0.0, b_z);
            prop_assert!(energy_scalar(&c, n + 1) > energy_scalar(&c, n));
            prop_assert!(energy_scalar(&c, n) >= 1.0);
        }

        #[test]
        fn kinematics_are_consistent(h in 1e-4f64..1.0, a in 0.0f64..0.01, b_z in -3.0f64..3.0, n in 1u32..10_000, plus in any::<bool>()) {
            let eps = if plus { Sign::Plus } else { Sign::Minus };
            let k = SpinKinematics::new(&cfg(h, a, b_z), n, eps).unwrap();
            prop_assert!((k.b - (1.0 + k.b_perp * k.b_perp).sqrt()).abs() < 1e-15 * k.b);
            prop_assert!((k.zeta_perp - 2.0 * k.kappa / (k.kappa * k.kappa + 1.0)).abs() < 1e-15);
            prop_assert!((k.zeta_perp.powi(2) + k.zeta_z.powi(2) - 1.0).abs() < 1e-14);
        }
    }
}
