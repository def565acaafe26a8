//! Laguerre functions `I_{n,s}(ρ)` and a Gauss-Laguerre oracle for
//! scalar-state matrix elements.
//!
//! `I_{n,s}(ρ) = (n!s!)^{-1/2} e^{-ρ/2} Q_s^{n-s}(ρ) ρ^{(n-s)/2}` with
//! `Q_s^l = s!·L_s^{(l)}`, which makes `∫₀^∞ I_{n,s}² dρ = 1`. Evaluation
//! runs the three-term recurrence directly on the normalized functions and
//! carries a separate logarithmic scale, so neither the `e^{-ρ/2}` prefactor
//! nor `ρ^{l/2}` overflow or underflow for `n` up to ~10⁴.

mod oracle;
mod quadrature;

pub use oracle::{
    momentum_element_quadrature, orthonormality_defect, semiclassical_convergence,
    ConvergenceRow, MomentumComponent,
};
pub use quadrature::{GaussLaguerre, QuadratureSpec};

use crate::error::{Error, Result};

const RESCALE_HIGH: f64 = 1e150;
const RESCALE_LOW: f64 = 1e-150;

/// Mantissa with a natural-log scale: value = `mantissa · e^{log_scale}`.
#[derive(Copy, Clone, Debug)]
pub(crate) struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        let log_abs = self.mantissa.abs().ln() + self.log_scale;
        if log_abs < -745.0 {
            0.0
        } else {
            self.mantissa.signum() * log_abs.exp()
        }
    }

    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

/// Normalized radial function `I_{n,s}` for fixed `(n, s)`; caches `ln l!`.
#[derive(Clone, Debug)]
pub struct LaguerreFunction {
    s: u32,
    l: u32,
    half_ln_l_factorial: f64,
}

impl LaguerreFunction {
    pub fn new(n: u32, s: u32) -> Result<Self> {
        if n < s {
            return Err(Error::domain(format!(
                "I_(n,s) needs n >= s (n={n}, s={s})"
            )));
        }
        let l = n - s;
        let ln_fact: f64 = (2..=l).map(|k| f64::from(k).ln()).sum();
        Ok(LaguerreFunction {
            s,
            l,
            half_ln_l_factorial: 0.5 * ln_fact,
        })
    }

    pub fn n(&self) -> u32 {
        self.s + self.l
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!("rho must be finite and >= 0, got {rho}")));
        }
        Ok(self.eval_scaled(rho).value())
    }

    /// Upward recurrence in `s` on
    /// `φ_k = √(k!/(k+l)!) e^{-ρ/2} ρ^{l/2} L_k^{(l)}(ρ)`:
    /// `√((k+1)(k+l+1)) φ_{k+1} = (2k+1+l−ρ) φ_k − √(k(k+l)) φ_{k−1}`.
    pub(crate) fn eval_scaled(&self, rho: f64) -> Scaled {
        let l = f64::from(self.l);
        let log_start = if self.l == 0 {
            -0.5 * rho
        } else if rho == 0.0 {
            return Scaled {
                mantissa: 0.0,
                log_scale: 0.0,
            };
        } else {
            -0.5 * rho + 0.5 * l * rho.ln() - self.half_ln_l_factorial
        };
        let mut prev = 0.0;
        let mut cur = 1.0;
        let mut log_scale = log_start;
        for k in 0..self.s {
            let kf = f64::from(k);
            let next = ((2.0 * kf + 1.0 + l - rho) * cur - (kf * (kf + l)).sqrt() * prev)
                / ((kf + 1.0) * (kf + l + 1.0)).sqrt();
            prev = cur;
            cur = next;
            let mag = cur.abs();
            if mag > RESCALE_HIGH || (mag < RESCALE_LOW && mag > 0.0) {
                let factor = mag;
                cur /= factor;
                prev /= factor;
                log_scale += factor.ln();
            }
        }
        Scaled {
            mantissa: cur,
            log_scale,
        }
    }
}

/// `I_{n,s}(ρ)`.
pub fn laguerre_i(n: u32, s: u32, rho: f64) -> Result<f64> {
    LaguerreFunction::new(n, s)?.eval(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Closed forms from the explicit generalized Laguerre polynomials.
    fn direct(n: u32, s: u32, rho: f64) -> f64 {
        let l = (n - s) as i32;
        let lf = f64::from(l);
        let poly = match s {
            0 => 1.0,
            1 => 1.0 + lf - rho,
            2 => 0.5 * (rho * rho - 2.0 * (lf + 2.0) * rho + (lf + 1.0) * (lf + 2.0)),
            3 => {
                (-rho.powi(3) + 3.0 * (lf + 3.0) * rho * rho - 3.0 * (lf + 2.0) * (lf + 3.0) * rho
                    + (lf + 1.0) * (lf + 2.0) * (lf + 3.0))
                    / 6.0
            }
            _ => unreachable!(),
        };
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        (fact(s) / fact(n)).sqrt() * (-0.5 * rho).exp() * rho.powi(l).sqrt() * poly
    }

    #[test]
    fn ground_state_is_exponential() {
        assert_eq!(laguerre_i(0, 0, 0.0).unwrap(), 1.0);
        for rho in [0.1, 1.0, 7.5, 40.0] {
            assert_relative_eq!(laguerre_i(0, 0, rho).unwrap(), (-0.5 * rho).exp(), max_relative = 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_small_closed_forms() {
        for n in 0..=3u32 {
            for s in 0..=n {
                for rho in [0.0, 0.3, 1.0, 2.5, 6.0, 11.0] {
                    let got = laguerre_i(n, s, rho).unwrap();
                    let want = direct(n, s, rho);
                    assert!((got - want).abs() <= 1e-14, "n={n} s={s} rho={rho}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(laguerre_i(2, 3, 1.0), Err(Error::Domain(_))));
        assert!(matches!(laguerre_i(2, 1, -1e-3), Err(Error::Domain(_))));
        assert!(laguerre_i(2, 1, f64::NAN).is_err());
    }

    #[test]
    fn stays_finite_at_large_n() {
        // near the classical radius ρ ≈ 2n the value is O(n^{-1/4}..1)
        for (n, s) in [(10_000u32, 0u32), (10_000, 10_000), (10_000, 5_000), (5_000, 37)] {
            let f = LaguerreFunction::new(n, s).unwrap();
            for rho in [1.0, f64::from(n), 2.0 * f64::from(n), 4.0 * f64::from(n)] {
                let v = f.eval(rho).unwrap();
                assert!(v.is_finite() && v.abs() <= 1.0, "n={n} s={s} rho={rho} -> {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_by_one(n in 0u32..400, frac in 0.0f64..1.0, rho in 0.0f64..2000.0) {
            let s = (frac * f64::from(n)) as u32;
            let v = laguerre_i(n, s, rho).unwrap();
            // |e^{-x/2} x^{l/2} L_s^{(l)}| √(s!/(s+l)!) ≤ 1 for all x ≥ 0
            prop_assert!(v.is_finite() && v.abs() <= 1.0 + 1e-12);
        }
    }
}
