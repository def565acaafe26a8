//! Exact scalar-state momentum matrix elements by angular and radial
//! quadrature, and their comparison against the semiclassical table.
//!
//! With `P_± = P_x ± iP_y` acting on `e^{ilφ} I_{n,s}(ρ)` (charge −e₀,
//! symmetric gauge, momenta in m₀c):
//!
//! ```text
//! P_+ ψ = −i√h e^{i(l+1)φ} [−2√ρ I_{n,s} − 2√s I_{n,s−1}]
//! P_− ψ = −i√h e^{i(l−1)φ} [(2l/√ρ) I_{n,s} − 2√s I_{n,s−1}]
//! ```
//!
//! Both radial integrands against any bra of the matching azimuthal index
//! are `e^{-ρ}` times an integer-power polynomial, so Gauss-Laguerre is
//! exact up to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{GaussLaguerre, LaguerreFunction, QuadratureSpec};
use crate::elements::scalar_momentum_element;
use crate::error::{Error, Result};
use crate::landau::{transverse_momentum, FieldConfig, ParticleKind, QuantumNumbers};

/// Order-doubling agreement required of every quadrature result.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentumComponent {
    X,
    Y,
    Z,
}

/// `|∫ I_{n,s} I_{n',s'} dρ − δ_{nn'}|` for equal azimuthal index.
pub fn orthonormality_defect(
    n: u32,
    n_prime: u32,
    s: u32,
    s_prime: u32,
    q: QuadratureSpec,
) -> Result<f64> {
    if i64::from(n) - i64::from(s) != i64::from(n_prime) - i64::from(s_prime) {
        return Err(Error::domain(format!(
            "orthonormality test needs equal azimuthal index (n-s={}, n'-s'={})",
            i64::from(n) - i64::from(s),
            i64::from(n_prime) - i64::from(s_prime)
        )));
    }
    let a = LaguerreFunction::new(n, s)?;
    let b = LaguerreFunction::new(n_prime, s_prime)?;
    let rule = GaussLaguerre::new(q)?;
    let overlap = rule.integrate(|x| a.eval_scaled(x).value() * b.eval_scaled(x).value());
    let target = if n == n_prime { 1.0 } else { 0.0 };
    Ok((overlap - target).abs())
}

/// `(1/2π)∫ e^{-i l_bra φ} e^{i l_ket φ} dφ` on a uniform grid, exact for
/// the trigonometric integrand once the grid has more points than `|Δl|`.
fn angular_overlap(l_bra: i64, l_ket: i64) -> Complex64 {
    let delta = l_ket - l_bra;
    let points = delta.unsigned_abs() + 1;
    let step = std::f64::consts::TAU / points as f64;
    let sum: Complex64 = (0..points)
        .map(|k| Complex64::from_polar(1.0, delta as f64 * step * k as f64))
        .sum();
    sum / points as f64
}

struct RadialKet {
    l: f64,
    sqrt_s: f64,
    state: LaguerreFunction,
    lowered: Option<LaguerreFunction>,
}

impl RadialKet {
    fn new(ket: &QuantumNumbers) -> Result<Self> {
        let state = LaguerreFunction::new(ket.n(), ket.s())?;
        let lowered = if ket.s() > 0 {
            Some(LaguerreFunction::new(ket.n(), ket.s() - 1)?)
        } else {
            None
        };
        Ok(RadialKet {
            l: ket.l() as f64,
            sqrt_s: f64::from(ket.s()).sqrt(),
            state,
            lowered,
        })
    }

    fn lowered_at(&self, rho: f64) -> f64 {
        self.lowered
            .as_ref()
            .map_or(0.0, |f| f.eval_scaled(rho).value())
    }

    /// Radial part of `P_+ ψ` (without the `−i√h` prefactor).
    fn raise(&self, rho: f64) -> f64 {
        -2.0 * rho.sqrt() * self.state.eval_scaled(rho).value() - 2.0 * self.sqrt_s * self.lowered_at(rho)
    }

    /// Radial part of `P_− ψ`.
    fn lower(&self, rho: f64) -> f64 {
        let direct = if self.l == 0.0 {
            0.0
        } else {
            2.0 * self.l / rho.sqrt() * self.state.eval_scaled(rho).value()
        };
        direct - 2.0 * self.sqrt_s * self.lowered_at(rho)
    }
}

fn element_at_order(
    bra: &QuantumNumbers,
    ket: &QuantumNumbers,
    component: MomentumComponent,
    cfg: &FieldConfig,
    q: QuadratureSpec,
) -> Result<Complex64> {
    let rule = GaussLaguerre::new(q)?;
    let bra_fn = LaguerreFunction::new(bra.n(), bra.s())?;
    let bra_at = |x: f64| bra_fn.eval_scaled(x).value();
    match component {
        MomentumComponent::Z => {
            let ang = angular_overlap(bra.l(), ket.l());
            if ang.norm() < 0.5 {
                return Ok(ang * 0.0);
            }
            let ket_fn = LaguerreFunction::new(ket.n(), ket.s())?;
            let overlap = rule.integrate(|x| bra_at(x) * ket_fn.eval_scaled(x).value());
            Ok(ang * overlap * cfg.b_z())
        }
        MomentumComponent::X | MomentumComponent::Y => {
            let radial = RadialKet::new(ket)?;
            let prefactor = Complex64::new(0.0, -cfg.h().sqrt());
            let ang_plus = angular_overlap(bra.l(), ket.l() + 1);
            let ang_minus = angular_overlap(bra.l(), ket.l() - 1);
            // the radial integral is only polynomial when the angular factor
            // selects this route; otherwise the route contributes ang·0
            let plus = if ang_plus.norm() > 0.5 {
                prefactor * ang_plus * rule.integrate(|x| bra_at(x) * radial.raise(x))
            } else {
                ang_plus * 0.0
            };
            let minus = if ang_minus.norm() > 0.5 {
                prefactor * ang_minus * rule.integrate(|x| bra_at(x) * radial.lower(x))
            } else {
                ang_minus * 0.0
            };
            Ok(match component {
                MomentumComponent::X => (plus + minus) * 0.5,
                _ => (plus - minus) / Complex64::new(0.0, 2.0),
            })
        }
    }
}

/// Exact `⟨bra|P̂_component|ket⟩` for scalar Landau states of equal radial
/// number, in units of m₀c. Fails with [`Error::Accuracy`] if doubling the
/// quadrature order moves the result by more than 1e-8.
pub fn momentum_element_quadrature(
    bra: &QuantumNumbers,
    ket: &QuantumNumbers,
    component: MomentumComponent,
    cfg: &FieldConfig,
) -> Result<Complex64> {
    if bra.s() != ket.s() {
        return Err(Error::domain(format!(
            "oracle assumes a fixed orbital center: s_bra={} != s_ket={}",
            bra.s(),
            ket.s()
        )));
    }
    if bra.l() < 0 || ket.l() < 0 {
        return Err(Error::domain("oracle states need non-negative azimuthal index"));
    }
    let q = QuadratureSpec::for_levels(bra.n(), ket.n());
    let coarse = element_at_order(bra, ket, component, cfg, q)?;
    let fine = element_at_order(bra, ket, component, cfg, q.doubled())?;
    let diff = (fine - coarse).norm();
    if diff > CONVERGENCE_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "order {} vs {} differ by {diff:e} for <{}|P|{}>",
            q.order(),
            q.doubled().order(),
            bra.n(),
            ket.n()
        )));
    }
    Ok(fine)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub exact_x: Complex64,
    pub exact_y: Complex64,
    pub semiclassical_x: Complex64,
    pub semiclassical_y: Complex64,
    pub rel_error_x: f64,
    pub rel_error_y: f64,
}

/// Relative deviation of the semiclassical `n → n+1` elements (with `b_⊥`
/// of level `n`) from the quadrature values, per `n`.
pub fn semiclassical_convergence(s: u32, h: f64, n_list: &[u32]) -> Result<Vec<ConvergenceRow>> {
    let cfg = FieldConfig::new(h, 0.0, 0.0)?;
    if let Some(&bad) = n_list.iter().find(|&&n| n == 0 || n < s) {
        return Err(Error::domain(format!(
            "convergence scan needs 1 <= n and n >= s (got n={bad}, s={s})"
        )));
    }
    n_list
        .par_iter()
        .map(|&n| {
            let ket = QuantumNumbers::scalar(n, s);
            let bra = QuantumNumbers::scalar(n + 1, s);
            let b_perp = transverse_momentum(h, n, ParticleKind::Scalar)?;
            let exact_x = momentum_element_quadrature(&bra, &ket, MomentumComponent::X, &cfg)?;
            let exact_y = momentum_element_quadrature(&bra, &ket, MomentumComponent::Y, &cfg)?;
            let semiclassical_x = scalar_momentum_element(n + 1, n, MomentumComponent::X, b_perp, 0.0);
            let semiclassical_y = scalar_momentum_element(n + 1, n, MomentumComponent::Y, b_perp, 0.0);
            Ok(ConvergenceRow {
                n,
                exact_x,
                exact_y,
                semiclassical_x,
                semiclassical_y,
                rel_error_x: (semiclassical_x - exact_x).norm() / exact_x.norm(),
                rel_error_y: (semiclassical_y - exact_y).norm() / exact_y.norm(),
            })
        })
        .collect()
}
