//! Closed-form matrix elements of momentum and spin between Landau states,
//! and band-sparse operator tables over a contiguous level set.
//!
//! All elements connect levels with `|m' − m| ≤ 1`. Momentum is diagonal in
//! ζ; the transverse spin components flip ζ. The transverse spin elements
//! are the literal branch-by-branch expansion of
//! `(b − ζ(δ₊ − δ₋))(δ₊ ∓ δ₋)δ_{−ζ'ζ}`, which gives the coefficient `(b − ζ)`
//! on the raising branch and `(b + ζ)` on the lowering branch:
//!
//! | element            | m' = m + 1      | m' = m − 1        |
//! |--------------------|-----------------|-------------------|
//! | `S_x`, ζ' = −ζ     | `(i/2)(b − ζ)`  | `−(i/2)(b + ζ)`   |
//! | `S_y`, ζ' = −ζ     | `(1/2)(b − ζ)`  | `(1/2)(b + ζ)`    |
//!
//! Both tables are Hermitian.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laguerre::MomentumComponent;
use crate::landau::{
    energy_scalar, energy_spinor, transverse_momentum, FieldConfig, ParticleKind, Sign,
    SpinKinematics,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Observable {
    Px,
    Py,
    Pz,
    Sx,
    Sy,
    Sz,
    S0,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::Px,
        Observable::Py,
        Observable::Pz,
        Observable::Sx,
        Observable::Sy,
        Observable::Sz,
        Observable::S0,
    ];

    pub fn is_spin(self) -> bool {
        matches!(self, Observable::Sx | Observable::Sy | Observable::Sz | Observable::S0)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpinComponent {
    X,
    Y,
    Z,
    /// Time component `S⁰`.
    Zero,
}

/// One basis state `(m, ζ)`; `zeta` is `None` for scalar particles.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisState {
    pub m: u32,
    pub zeta: Option<Sign>,
}

/// A contiguous range of principal quantum numbers `[m_min, m_max]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LevelSet {
    m_min: u32,
    m_max: u32,
}

impl LevelSet {
    pub fn new(m_min: u32, m_max: u32) -> Result<Self> {
        if m_min > m_max {
            return Err(Error::domain(format!("empty level set [{m_min}, {m_max}]")));
        }
        Ok(LevelSet { m_min, m_max })
    }

    /// Builds from an explicit list; it must be nonempty and contiguous.
    pub fn from_levels(levels: &[u32]) -> Result<Self> {
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        let (first, last) = match (sorted.first(), sorted.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::domain("level set must be nonempty")),
        };
        if sorted.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::domain(format!(
                "level set must be contiguous, got {levels:?}"
            )));
        }
        Self::new(first, last)
    }

    /// `count` levels around `n`: symmetric for odd counts, the extra
    /// level above `n` for even counts.
    pub fn centered(n: u32, count: u32) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("level count must be >= 1"));
        }
        let below = (count - 1) / 2;
        let m_min = n.checked_sub(below).ok_or_else(|| {
            Error::domain(format!("{count} levels around n={n} would include m < 0"))
        })?;
        let m_max = m_min
            .checked_add(count - 1)
            .ok_or_else(|| Error::domain("level index overflow"))?;
        Self::new(m_min, m_max)
    }

    pub fn m_min(&self) -> u32 {
        self.m_min
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    /// Number of levels (the packet size N).
    pub fn count(&self) -> u32 {
        self.m_max - self.m_min + 1
    }

    pub fn contains(&self, m: u32) -> bool {
        (self.m_min..=self.m_max).contains(&m)
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.m_min..=self.m_max
    }

    pub fn basis(&self, kind: ParticleKind) -> Vec<BasisState> {
        let channels: &[Option<Sign>] = match kind {
            ParticleKind::Scalar => &[None],
            ParticleKind::Spinor => &[Some(Sign::Minus), Some(Sign::Plus)],
        };
        self.levels()
            .flat_map(|m| channels.iter().map(move |&zeta| BasisState { m, zeta }))
            .collect()
    }
}

fn delta(m_prime: u32, m: u32, shift: i64) -> f64 {
    if i64::from(m_prime) - i64::from(m) == shift {
        1.0
    } else {
        0.0
    }
}

/// Semiclassical momentum elements of a scalar particle (units m₀c).
pub fn scalar_momentum_element(
    m_prime: u32,
    m: u32,
    component: MomentumComponent,
    b_perp: f64,
    b_z: f64,
) -> Complex64 {
    let up = delta(m_prime, m, 1);
    let down = delta(m_prime, m, -1);
    match component {
        MomentumComponent::X => Complex64::new(0.0, 0.5 * b_perp * (up - down)),
        MomentumComponent::Y => Complex64::new(0.5 * b_perp * (up + down), 0.0),
        MomentumComponent::Z => Complex64::new(b_z * delta(m_prime, m, 0), 0.0),
    }
}

/// Spinor momentum elements: the scalar table times `δ_{ζ'ζ}`.
pub fn spinor_momentum_element(
    m_prime: u32,
    zeta_prime: Sign,
    m: u32,
    zeta: Sign,
    component: MomentumComponent,
    b_perp: f64,
    b_z: f64,
) -> Complex64 {
    if zeta_prime == zeta {
        scalar_momentum_element(m_prime, m, component, b_perp, b_z)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Kinematic snapshot a band is built from.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct BandParams {
    pub b_perp: f64,
    pub b: f64,
    pub b_z: f64,
    /// Level energy `B_{nζ}` entering `S_z` and `S⁰`.
    pub energy: f64,
}

impl BandParams {
    pub fn from_kinematics(k: &SpinKinematics) -> Self {
        BandParams {
            b_perp: k.b_perp,
            b: k.b,
            b_z: k.b_z,
            energy: k.energy,
        }
    }

    /// Scalar reference level `n`.
    pub fn scalar(cfg: &FieldConfig, n: u32) -> Self {
        let b_perp = 2.0 * (cfg.h() * (f64::from(n) + 0.5)).sqrt();
        BandParams {
            b_perp,
            b: (1.0 + b_perp * b_perp).sqrt(),
            b_z: cfg.b_z(),
            energy: energy_scalar(cfg, n),
        }
    }
}

/// Spin elements between spinor Landau states.
pub fn spin_element(
    m_prime: u32,
    zeta_prime: Sign,
    m: u32,
    zeta: Sign,
    component: SpinComponent,
    params: &BandParams,
) -> Complex64 {
    let up = delta(m_prime, m, 1);
    let down = delta(m_prime, m, -1);
    let same = delta(m_prime, m, 0);
    let z = zeta.value();
    let flip = if zeta_prime == zeta.flip() { 1.0 } else { 0.0 };
    let keep = 1.0 - flip;
    let ladder = up - down;
    let BandParams {
        b_perp,
        b,
        b_z,
        energy,
    } = *params;
    match component {
        SpinComponent::X => Complex64::new(0.0, 0.5 * (b - z * ladder) * ladder * flip),
        SpinComponent::Y => Complex64::new(0.5 * (b - z * ladder) * (up + down) * flip, 0.0),
        SpinComponent::Z => {
            Complex64::new((z * energy / b * keep + b_perp * b_z / b * flip) * same, 0.0)
        }
        SpinComponent::Zero => {
            Complex64::new((z * b_z / b * keep + energy * b_perp / b * flip) * same, 0.0)
        }
    }
}

/// How band parameters vary across the level set.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub enum BandMode {
    /// One snapshot for every entry (the semiclassical regime).
    Frozen,
    /// `b_⊥`, `b` and `B` re-evaluated at the lower level of each pair,
    /// with the spinor energy taken on branch `zeta_ref`.
    PerLevel { cfg: FieldConfig, zeta_ref: Sign },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBand {
    observable: Observable,
    kind: ParticleKind,
    levels: LevelSet,
    params: BandParams,
    mode: BandMode,
    entries: BTreeMap<(BasisState, BasisState), Complex64>,
}

fn pair_params(
    reference: &BandParams,
    mode: &BandMode,
    kind: ParticleKind,
    m_prime: u32,
    m: u32,
) -> Result<BandParams> {
    match mode {
        BandMode::Frozen => Ok(*reference),
        BandMode::PerLevel { cfg, zeta_ref } => {
            let low = m_prime.min(m);
            let b_perp = transverse_momentum(cfg.h(), low, kind)?;
            let energy = match kind {
                ParticleKind::Scalar => energy_scalar(cfg, low),
                ParticleKind::Spinor => energy_spinor(cfg, low, *zeta_ref),
            };
            Ok(BandParams {
                b_perp,
                b: (1.0 + b_perp * b_perp).sqrt(),
                b_z: cfg.b_z(),
                energy,
            })
        }
    }
}

fn element(
    observable: Observable,
    kind: ParticleKind,
    row: BasisState,
    col: BasisState,
    p: &BandParams,
) -> Result<Complex64> {
    let momentum = |c: MomentumComponent| match (row.zeta, col.zeta) {
        (Some(zp), Some(z)) => spinor_momentum_element(row.m, zp, col.m, z, c, p.b_perp, p.b_z),
        _ => scalar_momentum_element(row.m, col.m, c, p.b_perp, p.b_z),
    };
    let spin = |c: SpinComponent| match (row.zeta, col.zeta) {
        (Some(zp), Some(z)) => Ok(spin_element(row.m, zp, col.m, z, c, p)),
        _ => Err(Error::domain(format!(
            "spin observable on {kind:?} basis state"
        ))),
    };
    match observable {
        Observable::Px => Ok(momentum(MomentumComponent::X)),
        Observable::Py => Ok(momentum(MomentumComponent::Y)),
        Observable::Pz => Ok(momentum(MomentumComponent::Z)),
        Observable::Sx => spin(SpinComponent::X),
        Observable::Sy => spin(SpinComponent::Y),
        Observable::Sz => spin(SpinComponent::Z),
        Observable::S0 => spin(SpinComponent::Zero),
    }
}

/// Tabulates one observable over `levels`, keeping only nonzero entries.
pub fn build_operator_band(
    levels: &LevelSet,
    observable: Observable,
    kind: ParticleKind,
    params: &BandParams,
    mode: BandMode,
) -> Result<OperatorBand> {
    if observable.is_spin() && kind == ParticleKind::Scalar {
        return Err(Error::domain(format!("{observable} is undefined for scalar particles")));
    }
    let basis = levels.basis(kind);
    let per_level = basis.len() / levels.count() as usize;
    let mut entries = BTreeMap::new();
    for (i, &row) in basis.iter().enumerate() {
        let level = i / per_level;
        let lo = level.saturating_sub(1) * per_level;
        let hi = ((level + 2) * per_level).min(basis.len());
        for &col in &basis[lo..hi] {
            let p = pair_params(params, &mode, kind, row.m, col.m)?;
            let v = element(observable, kind, row, col, &p)?;
            if v != Complex64::new(0.0, 0.0) {
                entries.insert((row, col), v);
            }
        }
    }
    Ok(OperatorBand {
        observable,
        kind,
        levels: *levels,
        params: *params,
        mode,
        entries,
    })
}

#[derive(Serialize)]
struct EntryDump {
    m_prime: u32,
    zeta_prime: Option<Sign>,
    m: u32,
    zeta: Option<Sign>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BandDump<'a> {
    observable: Observable,
    kind: ParticleKind,
    levels: &'a LevelSet,
    params: &'a BandParams,
    mode: &'a BandMode,
    entries: Vec<EntryDump>,
}

impl OperatorBand {
    pub fn observable(&self) -> Observable {
        self.observable
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    pub fn params(&self) -> &BandParams {
        &self.params
    }

    pub fn mode(&self) -> &BandMode {
        &self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry `⟨row|O|col⟩`, zero if absent.
    pub fn get(&self, row: BasisState, col: BasisState) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (BasisState, BasisState, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    /// `max |O_{rc} − conj(O_{cr})|` over all stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_band_one(&self) -> bool {
        self.entries().all(|(r, c, _)| r.m.abs_diff(c.m) <= 1)
    }

    /// JSON debug dump of indices and real/imaginary parts.
    pub fn to_json_dump(&self) -> serde_json::Value {
        let dump = BandDump {
            observable: self.observable,
            kind: self.kind,
            levels: &self.levels,
            params: &self.params,
            mode: &self.mode,
            entries: self
                .entries()
                .map(|(r, c, v)| EntryDump {
                    m_prime: r.m,
                    zeta_prime: r.zeta,
                    m: c.m,
                    zeta: c.zeta,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        serde_json::to_value(dump).expect("band dump is plain data")
    }
}

/// All bands a spinor (or scalar) trajectory needs, built over one level
/// set from one snapshot.
#[derive(Clone, Debug)]
pub struct ObservableBands {
    pub px: OperatorBand,
    pub py: OperatorBand,
    pub pz: OperatorBand,
    pub spin: Option<[OperatorBand; 4]>,
}

impl ObservableBands {
    pub fn build(
        levels: &LevelSet,
        kind: ParticleKind,
        params: &BandParams,
        mode: BandMode,
    ) -> Result<Self> {
        let band = |o| build_operator_band(levels, o, kind, params, mode);
        let spin = match kind {
            ParticleKind::Scalar => None,
            ParticleKind::Spinor => Some([
                band(Observable::S0)?,
                band(Observable::Sx)?,
                band(Observable::Sy)?,
                band(Observable::Sz)?,
            ]),
        };
        Ok(ObservableBands {
            px: band(Observable::Px)?,
            py: band(Observable::Py)?,
            pz: band(Observable::Pz)?,
            spin,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn params() -> BandParams {
        BandParams {
            b_perp: 1.3,
            b: (1.0f64 + 1.69).sqrt(),
            b_z: 0.7,
            energy: 2.1,
        }
    }

    #[test]
    fn scalar_momentum_examples() {
        assert_eq!(scalar_momentum_element(4, 4, MomentumComponent::X, 1.0, 0.0).norm(), 0.0);
        assert_eq!(scalar_momentum_element(5, 4, MomentumComponent::Y, 1.0, 0.0), Complex64::new(0.5, 0.0));
        assert_eq!(scalar_momentum_element(5, 4, MomentumComponent::X, 1.0, 0.0), 0.5 * I);
        assert_eq!(scalar_momentum_element(3, 4, MomentumComponent::X, 1.0, 0.0), -0.5 * I);
        assert_eq!(scalar_momentum_element(6, 4, MomentumComponent::Y, 1.0, 0.0).norm(), 0.0);
        assert_eq!(scalar_momentum_element(4, 4, MomentumComponent::Z, 1.0, 0.3).re, 0.3);
    }

    #[test]
    fn spinor_momentum_examples() {
        for c in [MomentumComponent::X, MomentumComponent::Y, MomentumComponent::Z] {
            for (mp, m) in [(4, 4), (5, 4), (3, 4)] {
                assert_eq!(spinor_momentum_element(mp, Sign::Minus, m, Sign::Plus, c, 2.0, 0.7).norm(), 0.0);
            }
        }
        assert_eq!(
            spinor_momentum_element(4, Sign::Plus, 4, Sign::Plus, MomentumComponent::Z, 2.0, 0.7),
            Complex64::new(0.7, 0.0)
        );
        assert_eq!(
            spinor_momentum_element(3, Sign::Minus, 4, Sign::Minus, MomentumComponent::X, 2.0, 0.7),
            -I
        );
    }

    #[test]
    fn spin_element_examples() {
        let p = params();
        for z in Sign::BOTH {
            let v = spin_element(4, z, 4, z, SpinComponent::Z, &p);
            assert_eq!(v.re, z.value() * p.energy / p.b);
            let v = spin_element(4, z.flip(), 4, z, SpinComponent::Zero, &p);
            assert_eq!(v.re, p.energy * p.b_perp / p.b);
            for zp in Sign::BOTH {
                assert_eq!(spin_element(4, zp, 4, z, SpinComponent::X, &p).norm(), 0.0);
            }
        }
    }

    #[test]
    fn transverse_spin_branch_coefficients() {
        let p = params();
        for z in Sign::BOTH {
            let zf = z.value();
            let raise = spin_element(5, z.flip(), 4, z, SpinComponent::X, &p);
            let lower = spin_element(3, z.flip(), 4, z, SpinComponent::X, &p);
            assert_eq!(raise, 0.5 * (p.b - zf) * I);
            assert_eq!(lower, -0.5 * (p.b + zf) * I);
            let raise = spin_element(5, z.flip(), 4, z, SpinComponent::Y, &p);
            let lower = spin_element(3, z.flip(), 4, z, SpinComponent::Y, &p);
            assert_eq!(raise.re, 0.5 * (p.b - zf));
            assert_eq!(lower.re, 0.5 * (p.b + zf));
            // no ζ-diagonal transverse spin
            assert_eq!(spin_element(5, z, 4, z, SpinComponent::Y, &p).norm(), 0.0);
        }
    }

    #[test]
    fn level_sets() {
        let l = LevelSet::centered(10, 3).unwrap();
        assert_eq!((l.m_min(), l.m_max(), l.count()), (9, 11, 3));
        let l = LevelSet::centered(10, 4).unwrap();
        assert_eq!((l.m_min(), l.m_max()), (9, 12));
        let l = LevelSet::centered(10, 2).unwrap();
        assert_eq!((l.m_min(), l.m_max()), (10, 11));
        assert!(LevelSet::centered(1, 5).is_err());
        assert!(LevelSet::centered(3, 0).is_err());
        assert_eq!(LevelSet::from_levels(&[7, 5, 6]).unwrap(), LevelSet::new(5, 7).unwrap());
        assert!(matches!(LevelSet::from_levels(&[5, 7]), Err(Error::Domain(_))));
        assert!(LevelSet::from_levels(&[]).is_err());
        assert!(LevelSet::from_levels(&[4, 4]).is_err());
    }

    #[test]
    fn band_structure_examples() {
        let p = params();
        let single = LevelSet::centered(8, 1).unwrap();
        let px = build_operator_band(&single, Observable::Px, ParticleKind::Spinor, &p, BandMode::Frozen).unwrap();
        assert!(px.is_empty());

        let three = LevelSet::centered(8, 3).unwrap();
        let pz = build_operator_band(&three, Observable::Pz, ParticleKind::Spinor, &p, BandMode::Frozen).unwrap();
        assert_eq!(pz.len(), 6);
        assert!(pz.entries().all(|(r, c, v)| r == c && v.re == p.b_z));

        assert!(build_operator_band(&three, Observable::Sx, ParticleKind::Scalar, &p, BandMode::Frozen).is_err());
    }

    #[test]
    fn every_band_is_hermitian_and_band_one() {
        let cfg = FieldConfig::new(0.05, 0.01, 0.4).unwrap();
        let k = SpinKinematics::new(&cfg, 30, Sign::Plus).unwrap();
        let p = BandParams::from_kinematics(&k);
        let levels = LevelSet::centered(30, 7).unwrap();
        let modes = [BandMode::Frozen, BandMode::PerLevel { cfg, zeta_ref: Sign::Plus }];
        for mode in modes {
            for o in Observable::ALL {
                let band = build_operator_band(&levels, o, ParticleKind::Spinor, &p, mode).unwrap();
                assert_eq!(band.hermiticity_defect(), 0.0, "{o} {mode:?}");
                assert!(band.is_band_one());
                let zeta_diag = band.entries().all(|(r, c, _)| r.zeta == c.zeta);
                let zeta_flip = band.entries().all(|(r, c, _)| r.zeta != c.zeta);
                match o {
                    Observable::Px | Observable::Py | Observable::Pz => assert!(zeta_diag),
                    Observable::Sx | Observable::Sy => assert!(zeta_flip),
                    _ => {}
                }
            }
            for o in [Observable::Px, Observable::Py, Observable::Pz] {
                let band = build_operator_band(&levels, o, ParticleKind::Scalar, &BandParams::scalar(&cfg, 30), mode).unwrap();
                assert_eq!(band.hermiticity_defect(), 0.0);
            }
        }
    }

    #[test]
    fn per_level_mode_uses_lower_level() {
        let cfg = FieldConfig::new(0.1, 0.0, 0.0).unwrap();
        let levels = LevelSet::new(4, 6).unwrap();
        let band = build_operator_band(
            &levels,
            Observable::Py,
            ParticleKind::Scalar,
            &BandParams::scalar(&cfg, 5),
            BandMode::PerLevel { cfg, zeta_ref: Sign::Plus },
        )
        .unwrap();
        let v = band.get(BasisState { m: 6, zeta: None }, BasisState { m: 5, zeta: None });
        let b_perp5 = transverse_momentum(0.1, 5, ParticleKind::Scalar).unwrap();
        assert_eq!(v.re, 0.5 * b_perp5);
    }

    #[test]
    fn json_dump_lists_entries() {
        let levels = LevelSet::centered(8, 3).unwrap();
        let band = build_operator_band(&levels, Observable::Sx, ParticleKind::Spinor, &params(), BandMode::Frozen).unwrap();
        let dump = band.to_json_dump();
        assert_eq!(dump["observable"], "Sx");
        assert_eq!(dump["entries"].as_array().unwrap().len(), band.len());
        assert!(dump["entries"][0]["re"].is_number());
    }
}
