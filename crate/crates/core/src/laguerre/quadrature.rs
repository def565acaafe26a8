//! Gauss-Laguerre rules on `[0, ∞)` with weight `e^{-x}`.
//!
//! Weights are stored premultiplied by `e^{x}` so that integrands carrying
//! their own exponential decay (products of `I_{n,s}`) are summed directly:
//! `∫₀^∞ f(x) dx ≈ Σ w̃_i f(x_i)`, exact when `f = e^{-x}·p` with
//! `deg p ≤ 2·order − 1`. Large orders stay well conditioned because no
//! `e^{-x_i}` factor is ever formed.

use serde::Serialize;

use super::{RESCALE_HIGH, RESCALE_LOW};
use crate::error::{Error, Result};

/// Number of nodes of a Gauss-Laguerre rule.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    order: usize,
}

impl QuadratureSpec {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("quadrature order must be positive"));
        }
        Ok(QuadratureSpec { order })
    }

    /// Default order `2(n + n') + 8` for an integrand built from levels
    /// `n` and `n'`.
    pub fn for_levels(n: u32, n_prime: u32) -> Self {
        QuadratureSpec {
            order: 2 * (n as usize + n_prime as usize) + 8,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            order: 2 * self.order,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        let n = spec.order;
        // Jacobi matrix of the Laguerre polynomials: diag 2k+1, off-diag k+1
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
        let off: Vec<f64> = (0..n).map(|k| if k + 1 < n { k as f64 + 1.0 } else { 0.0 }).collect();
        let mut nodes = tridiagonal_eigenvalues(diag, off)?;
        nodes.sort_by(f64::total_cmp);
        for x in nodes.iter_mut() {
            *x = polish_root(*x, n);
        }
        let np1 = (n + 1) as f64;
        let scaled_weights = nodes
            .iter()
            .map(|&x| {
                // w e^{x} = x / ((N+1)² φ_{N+1}(x)²) with φ_k = e^{-x/2} L_k
                let (phi, _) = laguerre_pair(n + 1, x);
                (x.ln() - 2.0 * np1.ln() - 2.0 * phi.ln_abs()).exp()
            })
            .collect();
        Ok(GaussLaguerre {
            nodes,
            scaled_weights,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights times `e^{x_i}`.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// `∫₀^∞ f(x) dx` for an `f` that already contains its `e^{-x}` decay.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫₀^∞ e^{-x} p(x) dx` for a polynomial-like `p`.
    pub fn integrate_weighted<F: FnMut(f64) -> f64>(&self, mut p: F) -> f64 {
        self.integrate(|x| p(x) * (-x).exp())
    }
}

/// `(φ_N(x), φ_{N-1}(x))` in scaled form, `φ_k = e^{-x/2} L_k(x)`, sharing
/// one log scale.
fn laguerre_pair(order: usize, x: f64) -> (super::Scaled, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = -0.5 * x;
    for k in 0..order {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > RESCALE_HIGH || (mag < RESCALE_LOW && mag > 0.0) {
            cur /= mag;
            prev /= mag;
            log_scale += mag.ln();
        }
    }
    (
        super::Scaled {
            mantissa: cur,
            log_scale,
        },
        prev,
    )
}

/// Newton refinement of a root of `L_N` using `x L_N' = N (L_N − L_{N−1})`.
fn polish_root(mut x: f64, order: usize) -> f64 {
    let nf = order as f64;
    for _ in 0..8 {
        let (cur, prev) = laguerre_pair(order, x);
        let denom = nf * (cur.mantissa - prev);
        if denom == 0.0 {
            break;
        }
        let step = x * cur.mantissa / denom;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `off[i]` couples `i` and `i + 1`; `off[n-1]` is unused.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 100 {
                return Err(Error::Accuracy(format!(
                    "tridiagonal QL failed to converge at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_rules_match_tabulated_nodes() {
        // L_2 = (x² − 4x + 2)/2 → 2 ∓ √2, weights (2 ± √2)/4
        let rule = GaussLaguerre::new(QuadratureSpec::new(2).unwrap()).unwrap();
        let s2 = 2f64.sqrt();
        assert_relative_eq!(rule.nodes()[0], 2.0 - s2, max_relative = 1e-14);
        assert_relative_eq!(rule.nodes()[1], 2.0 + s2, max_relative = 1e-14);
        let w0 = rule.scaled_weights()[0] * (-rule.nodes()[0]).exp();
        assert_relative_eq!(w0, (2.0 + s2) / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_moments_exactly() {
        for order in [1usize, 5, 20, 60] {
            let rule = GaussLaguerre::new(QuadratureSpec::new(order).unwrap()).unwrap();
            let mut fact = 1.0;
            for k in 0..(2 * order).min(40) {
                if k > 0 {
                    fact *= k as f64;
                }
                let got = rule.integrate_weighted(|x| x.powi(k as i32));
                assert_relative_eq!(got, fact, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn large_orders_have_unit_total_weight() {
        for order in [200usize, 808, 1616] {
            let rule = GaussLaguerre::new(QuadratureSpec::new(order).unwrap()).unwrap();
            let total = rule.integrate(|x| (-x).exp());
            // recurrence rounding in the weights grows about like order²
            let tol = 1e-15 * (order * order) as f64;
            assert!((total - 1.0).abs() < tol, "order {order}: {total}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            // ∫ x e^{-x} = 1 also checks the large-x nodes
            let first = rule.integrate(|x| x * (-x).exp());
            assert!((first - 1.0).abs() < tol);
        }
    }

    #[test]
    fn default_order_for_levels() {
        assert_eq!(QuadratureSpec::for_levels(3, 5).order(), 24);
        assert!(QuadratureSpec::new(0).is_err());
    }
}
