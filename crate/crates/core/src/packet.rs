//! N-level wave packets and their amplitude structure sums 𝔄.
//!
//! A packet spreads equal probability over a contiguous level set. Spinor
//! packets carry the longitudinal-polarization ratio `A_{+1,m} = κ A_{−1,m}`
//! on every level.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elements::{BasisState, LevelSet};
use crate::error::{Error, Result};
use crate::landau::{FieldConfig, ParticleKind, Sign, SpinKinematics};

/// `(N − 1)/N`, the oscillation amplitude factor of an `N`-level packet.
pub fn semiclassical_factor(levels: u32) -> f64 {
    if levels == 0 {
        return 0.0;
    }
    f64::from(levels - 1) / f64::from(levels)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PacketSpec {
    kind: ParticleKind,
    levels: LevelSet,
    reference: u32,
    epsilon: Option<Sign>,
    kappa: Option<f64>,
    amplitudes: BTreeMap<BasisState, Complex64>,
}

/// Equal-weight real scalar packet of `count` levels around `n`.
pub fn build_scalar_packet(n: u32, count: u32) -> Result<PacketSpec> {
    let levels = LevelSet::centered(n, count)?;
    let a = Complex64::new(1.0 / f64::from(count).sqrt(), 0.0);
    let amplitudes = levels
        .levels()
        .map(|m| (BasisState { m, zeta: None }, a))
        .collect();
    Ok(PacketSpec {
        kind: ParticleKind::Scalar,
        levels,
        reference: n,
        epsilon: None,
        kappa: None,
        amplitudes,
    })
}

/// Longitudinally polarized spinor packet with κ taken at the reference
/// level `n` (energy branch ζ = ε).
pub fn build_spinor_packet(n: u32, count: u32, cfg: &FieldConfig, epsilon: Sign) -> Result<PacketSpec> {
    let kin = SpinKinematics::new(cfg, n, epsilon)?;
    PacketSpec::from_kinematics(n, count, &kin)
}

impl PacketSpec {
    /// Spinor packet with the κ of precomputed kinematics.
    pub fn from_kinematics(n: u32, count: u32, kin: &SpinKinematics) -> Result<Self> {
        let levels = LevelSet::centered(n, count)?;
        if levels.m_min() < 1 {
            return Err(Error::domain(format!(
                "spinor packet of {count} levels around n={n} reaches m=0"
            )));
        }
        let kappa = kin.kappa;
        let minus = 1.0 / (f64::from(count) * (kappa * kappa + 1.0)).sqrt();
        let plus = kappa * minus;
        let mut amplitudes = BTreeMap::new();
        for m in levels.levels() {
            amplitudes.insert(BasisState { m, zeta: Some(Sign::Minus) }, Complex64::new(minus, 0.0));
            amplitudes.insert(BasisState { m, zeta: Some(Sign::Plus) }, Complex64::new(plus, 0.0));
        }
        Ok(PacketSpec {
            kind: ParticleKind::Spinor,
            levels,
            reference: n,
            epsilon: Some(kin.epsilon),
            kappa: Some(kappa),
            amplitudes,
        })
    }

    /// Raw packet; keys must be basis states of `levels` for `kind`.
    /// Normalization is not enforced.
    pub fn from_amplitudes(
        kind: ParticleKind,
        levels: LevelSet,
        reference: u32,
        amplitudes: BTreeMap<BasisState, Complex64>,
    ) -> Result<Self> {
        let basis = levels.basis(kind);
        if let Some(bad) = amplitudes.keys().find(|k| !basis.contains(k)) {
            return Err(Error::domain(format!(
                "amplitude for {bad:?} outside the {kind:?} basis of {levels:?}"
            )));
        }
        Ok(PacketSpec {
            kind,
            levels,
            reference,
            epsilon: None,
            kappa: None,
            amplitudes,
        })
    }

    /// Multiplies level `m_min + k` by `e^{iφ_k}` (both ζ alike, so the
    /// κ ratio survives).
    pub fn with_level_phases(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.levels.count() as usize {
            return Err(Error::domain(format!(
                "{} phases for {} levels",
                phases.len(),
                self.levels.count()
            )));
        }
        let mut out = self.clone();
        for (state, a) in out.amplitudes.iter_mut() {
            let k = (state.m - self.levels.m_min()) as usize;
            *a *= Complex64::from_polar(1.0, phases[k]);
        }
        Ok(out)
    }

    /// Level phases drawn uniformly from `[−πσ, πσ]` with a seeded ChaCha
    /// stream.
    pub fn with_random_phases(&self, seed: u64, strength: f64) -> Result<Self> {
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::domain(format!("phase strength must be >= 0, got {strength}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = std::f64::consts::PI * strength;
        let phases: Vec<f64> = (0..self.levels.count())
            .map(|_| if span > 0.0 { rng.gen_range(-span..=span) } else { 0.0 })
            .collect();
        self.with_level_phases(&phases)
    }

    /// Replaces one amplitude, keeping the rest of the packet.
    pub fn with_amplitude(&self, state: BasisState, value: Complex64) -> Result<Self> {
        if !self.levels.basis(self.kind).contains(&state) {
            return Err(Error::domain(format!("{state:?} is not a basis state of this packet")));
        }
        let mut out = self.clone();
        out.amplitudes.insert(state, value);
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.amplitudes.values_mut().for_each(|a| *a *= factor);
        out
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    pub fn reference(&self) -> u32 {
        self.reference
    }

    pub fn epsilon(&self) -> Option<Sign> {
        self.epsilon
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn amplitude(&self, state: BasisState) -> Complex64 {
        self.amplitudes.get(&state).copied().unwrap_or_default()
    }

    pub fn amplitudes(&self) -> &BTreeMap<BasisState, Complex64> {
        &self.amplitudes
    }

    pub fn normalization_defect(&self) -> f64 {
        (self.amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs()
    }

    /// `max_m |Σ_ζ |A_{ζm}|² − 1/N|`.
    pub fn level_probability_defect(&self) -> f64 {
        let target = 1.0 / f64::from(self.levels.count());
        self.levels
            .levels()
            .map(|m| {
                let p: f64 = self
                    .amplitudes
                    .iter()
                    .filter(|(k, _)| k.m == m)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                (p - target).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max_m |A_{+1,m} − κ A_{−1,m}|`; zero for scalar packets.
    pub fn polarization_defect(&self) -> f64 {
        let Some(kappa) = self.kappa else { return 0.0 };
        self.levels
            .levels()
            .map(|m| {
                let plus = self.amplitude(BasisState { m, zeta: Some(Sign::Plus) });
                let minus = self.amplitude(BasisState { m, zeta: Some(Sign::Minus) });
                (plus - kappa * minus).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn structure_sums(&self) -> StructureSums {
        let a = |m: u32, zeta: Option<Sign>| self.amplitude(BasisState { m, zeta });
        let adjacent = self.levels.m_min()..self.levels.m_max();
        match self.kind {
            ParticleKind::Scalar => StructureSums::Scalar {
                a_kg: adjacent.map(|m| a(m, None).conj() * a(m + 1, None)).sum(),
            },
            ParticleKind::Spinor => {
                let (p, n) = (Some(Sign::Plus), Some(Sign::Minus));
                let a1 = adjacent
                    .clone()
                    .map(|m| a(m, p).conj() * a(m + 1, p) + a(m, n).conj() * a(m + 1, n))
                    .sum();
                let a2 = adjacent.map(|m| a(m, p).conj() * a(m + 1, n)).sum();
                let a3 = self.levels.levels().map(|m| a(m, p).conj() * a(m, n)).sum();
                let a4 = self
                    .levels
                    .levels()
                    .map(|m| Complex64::new(a(m, p).norm_sqr() - a(m, n).norm_sqr(), 0.0))
                    .sum();
                StructureSums::Spinor { a1, a2, a3, a4 }
            }
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub enum StructureSums {
    Scalar {
        a_kg: Complex64,
    },
    Spinor {
        a1: Complex64,
        a2: Complex64,
        a3: Complex64,
        a4: Complex64,
    },
}

impl StructureSums {
    /// 𝔄_KG for scalars, 𝔄₁ for spinors.
    pub fn amplitude_factor(&self) -> Complex64 {
        match *self {
            StructureSums::Scalar { a_kg } => a_kg,
            StructureSums::Spinor { a1, .. } => a1,
        }
    }
}

/// The printed form `((N−1)/N)·κ/(κ+1)` of the ζ-flipping adjacent sum.
/// The construction gives `((N−1)/N)·κ/(κ²+1)`; the two agree only at κ = 1
/// (and κ = 0).
pub fn printed_a2(levels: u32, kappa: f64) -> f64 {
    semiclassical_factor(levels) * kappa / (kappa + 1.0)
}

/// `((N−1)/N)·κ/(κ²+1)`.
pub fn constructive_a2(levels: u32, kappa: f64) -> f64 {
    semiclassical_factor(levels) * kappa / (kappa * kappa + 1.0)
}

#[derive(Serialize)]
struct AmplitudeDump {
    m: u32,
    zeta: Option<Sign>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PacketDump<'a> {
    kind: ParticleKind,
    levels: &'a LevelSet,
    reference: u32,
    epsilon: Option<Sign>,
    kappa: Option<f64>,
    amplitudes: Vec<AmplitudeDump>,
}

impl Serialize for PacketSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PacketDump {
            kind: self.kind,
            levels: &self.levels,
            reference: self.reference,
            epsilon: self.epsilon,
            kappa: self.kappa,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(k, a)| AmplitudeDump {
                    m: k.m,
                    zeta: k.zeta,
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spinor_sums(p: &PacketSpec) -> (Complex64, Complex64, Complex64, Complex64) {
        match p.structure_sums() {
            StructureSums::Spinor { a1, a2, a3, a4 } => (a1, a2, a3, a4),
            other => panic!("expected spinor sums, got {other:?}"),
        }
    }

    fn kin_with_kappa(kappa: f64) -> SpinKinematics {
        let mut k = SpinKinematics::from_parts(1.0, 0.0, 2f64.sqrt(), Sign::Plus).unwrap();
        k.kappa = kappa;
        k
    }

    #[test]
    fn scalar_examples() {
        let p = build_scalar_packet(10, 3).unwrap();
        assert_eq!(p.levels().m_min(), 9);
        assert_eq!(p.levels().m_max(), 11);
        for a in p.amplitudes().values() {
            assert_abs_diff_eq!(a.re, 1.0 / 3f64.sqrt(), epsilon = 1e-16);
        }
        let kg = p.structure_sums().amplitude_factor();
        assert_abs_diff_eq!(kg.re, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(kg.im, 0.0);

        let single = build_scalar_packet(10, 1).unwrap();
        assert_eq!(single.structure_sums().amplitude_factor().re, 0.0);

        let five = build_scalar_packet(100, 5).unwrap();
        assert_abs_diff_eq!(five.structure_sums().amplitude_factor().re, 0.8, epsilon = 1e-15);

        assert!(matches!(build_scalar_packet(1, 5), Err(Error::Domain(_))));
        assert!(build_scalar_packet(2, 5).is_ok());
    }

    #[test]
    fn spinor_examples() {
        let p = PacketSpec::from_kinematics(5, 3, &kin_with_kappa(1.0)).unwrap();
        for a in p.amplitudes().values() {
            assert_abs_diff_eq!(a.re, 1.0 / 6f64.sqrt(), epsilon = 1e-16);
        }
        let cfg = FieldConfig::new(0.1, 0.01, 0.5).unwrap();
        let p = build_spinor_packet(10, 3, &cfg, Sign::Minus).unwrap();
        let kappa = p.kappa().unwrap();
        let (a1, _, a3, _) = spinor_sums(&p);
        assert_abs_diff_eq!(a1.re, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a3.re, kappa / (kappa * kappa + 1.0), epsilon = 1e-15);
        assert!(p.normalization_defect() <= 1e-14);

        // reaches m = 0
        assert!(build_spinor_packet(1, 3, &cfg, Sign::Plus).is_err());
        let still = FieldConfig::new(0.0, 0.0, 0.5).unwrap();
        assert!(matches!(build_spinor_packet(5, 3, &still, Sign::Plus), Err(Error::Singular(_))));
    }

    #[test]
    fn normalization_examples() {
        let p = build_scalar_packet(10, 4).unwrap();
        assert!(p.normalization_defect() <= 1e-14);
        assert_abs_diff_eq!(p.scaled(2.0).normalization_defect(), 3.0, epsilon = 1e-14);
        let empty =
            PacketSpec::from_amplitudes(ParticleKind::Scalar, *p.levels(), 10, BTreeMap::new()).unwrap();
        assert_eq!(empty.normalization_defect(), 1.0);
        let state = BasisState { m: 9, zeta: None };
        let bumped = p.with_amplitude(state, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(bumped.normalization_defect(), 0.75, epsilon = 1e-14);
        assert!(p.with_amplitude(BasisState { m: 3, zeta: None }, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn raw_amplitudes_must_fit_basis() {
        let levels = LevelSet::new(3, 4).unwrap();
        let mut map = BTreeMap::new();
        map.insert(BasisState { m: 5, zeta: None }, Complex64::new(1.0, 0.0));
        assert!(PacketSpec::from_amplitudes(ParticleKind::Scalar, levels, 3, map.clone()).is_err());
        map.clear();
        map.insert(BasisState { m: 3, zeta: None }, Complex64::new(1.0, 0.0));
        assert!(PacketSpec::from_amplitudes(ParticleKind::Spinor, levels, 3, map).is_err());
    }

    #[test]
    fn printed_and_constructive_a2_differ_off_unit_kappa() {
        assert_abs_diff_eq!(printed_a2(3, 1.0), constructive_a2(3, 1.0), epsilon = 1e-16);
        assert!((printed_a2(3, 3f64.sqrt()) - constructive_a2(3, 3f64.sqrt())).abs() > 0.05);
    }

    #[test]
    fn phase_randomization_degrades_a1_not_a4() {
        let cfg = FieldConfig::new(0.05, 0.0, 0.3).unwrap();
        let p = build_spinor_packet(40, 7, &cfg, Sign::Plus).unwrap();
        let (a1, _, _, a4) = spinor_sums(&p);
        for seed in 0..8 {
            let q = p.with_random_phases(seed, 1.0).unwrap();
            let (b1, _, _, b4) = spinor_sums(&q);
            assert!(b1.norm() < a1.norm());
            assert_abs_diff_eq!(b4.re, a4.re, epsilon = 1e-15);
            assert!(q.normalization_defect() <= 1e-14);
            assert!(q.polarization_defect() <= 1e-14);
        }
        assert_eq!(p.with_random_phases(3, 0.5).unwrap(), p.with_random_phases(3, 0.5).unwrap());
        assert_eq!(p.with_random_phases(3, 0.0).unwrap(), p);
    }

    #[test]
    fn json_contains_amplitudes() {
        let p = build_scalar_packet(10, 3).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["amplitudes"].as_array().unwrap().len(), 3);
        assert_eq!(v["kind"], "scalar");
    }

    proptest! {
        #[test]
        fn sums_follow_level_law(count in 1u32..60, kappa in -5.0f64..5.0) {
            let p = PacketSpec::from_kinematics(200, count, &kin_with_kappa(kappa)).unwrap();
            let (a1, a2, a3, a4) = spinor_sums(&p);
            let f = semiclassical_factor(count);
            let k2 = kappa * kappa;
            prop_assert!((a1.re - f).abs() <= 1e-12);
            prop_assert!((a2.re - constructive_a2(count, kappa)).abs() <= 1e-12);
            prop_assert!((a3.re - kappa / (k2 + 1.0)).abs() <= 1e-12);
            prop_assert!((a4.re - (k2 - 1.0) / (k2 + 1.0)).abs() <= 1e-12);
            prop_assert!(a1.im == 0.0 && a2.im == 0.0 && a3.im == 0.0 && a4.im == 0.0);
            prop_assert!(p.normalization_defect() <= 1e-14);
            prop_assert!(p.level_probability_defect() <= 1e-15);
            prop_assert!(p.polarization_defect() <= 1e-15);
        }

        #[test]
        fn scalar_factor_law(count in 1u32..200) {
            let p = build_scalar_packet(500, count).unwrap();
            let a = p.structure_sums().amplitude_factor();
            prop_assert!((a.re - semiclassical_factor(count)).abs() <= 1e-12);
        }
    }
}
