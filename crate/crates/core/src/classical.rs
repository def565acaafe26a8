//! Classical reference: cyclotron motion in closed form and a fixed-step
//! RK4 integrator of the BMT spin equation in a uniform field along z.
//!
//! With metric (+,−,−,−) and the reduced field tensor `G^{12} = −G^{21} = 2h`
//! (charge-to-mass coupling absorbed into `h`),
//!
//! ```text
//! du^μ/dτ = G^{μν} u_ν
//! dS^μ/dτ = (g/2) G^{μν} S_ν + (g/2 − 1) u^μ (S_α G^{αβ} u_β)
//! ```
//!
//! integrated in lab time `dt = γ dτ`, `γ = u⁰`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::closed_form_spin_with_factor;
use crate::landau::SpinKinematics;
use crate::trajectory::{minkowski, FourVector, Trajectory};

/// Steps per cyclotron period used when no step is given.
pub const DEFAULT_STEPS_PER_PERIOD: u32 = 1000;
/// Coarsest step accepted, in steps per cyclotron period.
pub const MIN_STEPS_PER_PERIOD: f64 = 50.0;
/// Invariant drift above which an integration is rejected.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Tolerance on the invariants of an initial state.
pub const INITIAL_STATE_TOLERANCE: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalState {
    /// `(γ, u_x, u_y, u_z)`.
    pub u: FourVector,
    /// `(S⁰, S_x, S_y, S_z)`.
    pub s: FourVector,
    pub g_factor: f64,
}

impl ClassicalState {
    pub fn new(u: FourVector, s: FourVector, g_factor: f64) -> Result<Self> {
        if !u.iter().chain(&s).all(|v| v.is_finite()) || !g_factor.is_finite() {
            return Err(Error::domain("classical state must be finite"));
        }
        if u[0] <= 0.0 {
            return Err(Error::domain(format!("u⁰ must be positive, got {}", u[0])));
        }
        let scale = u[0] * s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let orth = minkowski(&s, &u).abs();
        if orth > INITIAL_STATE_TOLERANCE * scale {
            return Err(Error::domain(format!("initial S·u = {orth:e} is not zero")));
        }
        let norm = (-minkowski(&s, &s) - 1.0).abs();
        if norm > INITIAL_STATE_TOLERANCE * scale * scale {
            return Err(Error::domain(format!("initial |S² + 1| = {norm:e} is not zero")));
        }
        Ok(ClassicalState { u, s, g_factor })
    }

    /// Momentum and spin of the unit-factor closed forms at `t = 0`,
    /// `g = 2(1 + anomaly)`.
    pub fn from_closed_form(k: &SpinKinematics, anomaly: f64) -> Result<Self> {
        let s = closed_form_spin_with_factor(k, 1.0, 0.0, 0.0, 0.0);
        Self::new([k.energy, 0.0, k.b_perp, k.b_z], s, 2.0 * (1.0 + anomaly))
    }

    /// `2h/γ`.
    pub fn cyclotron_frequency(&self, h: f64) -> f64 {
        2.0 * h / self.u[0]
    }
}

/// `(−b_⊥ sin ωt, b_⊥ cos ωt, b_z)`.
pub fn classical_momentum(t: f64, b_perp: f64, b_z: f64, omega: f64) -> [f64; 3] {
    let (s, c) = (omega * t).sin_cos();
    [-b_perp * s, b_perp * c, b_z]
}

type State = [f64; 8];

fn rhs(y: &State, h: f64, g: f64) -> State {
    let gamma = y[0];
    let (ux, uy) = (y[1], y[2]);
    let (sx, sy) = (y[5], y[6]);
    let w = 2.0 * h;
    let half_g = 0.5 * g;
    // S_α G^{αβ} u_β
    let sgu = w * (sx * uy - sy * ux);
    let kick = (half_g - 1.0) * sgu;
    let inv = 1.0 / gamma;
    [
        0.0,
        -w * uy * inv,
        w * ux * inv,
        0.0,
        kick * y[0] * inv,
        (-half_g * w * sy + kick * ux) * inv,
        (half_g * w * sx + kick * uy) * inv,
        kick * y[3] * inv,
    ]
}

fn rk4_step(y: &State, dt: f64, h: f64, g: f64) -> State {
    let add = |a: &State, b: &State, c: f64| {
        let mut out = *a;
        for i in 0..8 {
            out[i] += c * b[i];
        }
        out
    };
    let k1 = rhs(y, h, g);
    let k2 = rhs(&add(y, &k1, 0.5 * dt), h, g);
    let k3 = rhs(&add(y, &k2, 0.5 * dt), h, g);
    let k4 = rhs(&add(y, &k3, dt), h, g);
    let mut out = *y;
    for i in 0..8 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn split(y: &State) -> (FourVector, FourVector) {
    ([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]])
}

/// Advances one RK4 step of lab time `dt`.
pub fn bmt_step(state: &ClassicalState, h: f64, dt: f64) -> ClassicalState {
    let y = [
        state.u[0], state.u[1], state.u[2], state.u[3], state.s[0], state.s[1], state.s[2], state.s[3],
    ];
    let (u, s) = split(&rk4_step(&y, dt, h, state.g_factor));
    ClassicalState { u, s, g_factor: state.g_factor }
}

fn check_step(init: &ClassicalState, h: f64, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {dt}")));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("field h must be >= 0, got {h}")));
    }
    let omega = init.cyclotron_frequency(h);
    if omega > 0.0 {
        let limit = 2.0 * std::f64::consts::PI / (MIN_STEPS_PER_PERIOD * omega);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "step {dt} exceeds 2π/(50ω) = {limit}"
            )));
        }
    }
    Ok(())
}

fn finish(times: Vec<f64>, states: Vec<State>) -> Result<Trajectory> {
    let (momentum, spin): (Vec<_>, Vec<_>) = states.iter().map(split).unzip();
    let traj = Trajectory::new(times, momentum, Some(spin))?;
    let res = traj.residuals().unwrap_or_default();
    let Some(r0) = res.first() else { return Ok(traj) };
    let drift = res
        .iter()
        .map(|r| (r.sp - r0.sp).abs().max((r.ss - r0.ss).abs()))
        .fold(0.0, f64::max);
    if drift > DRIFT_LIMIT {
        return Err(Error::Integration(format!(
            "invariant drift {drift:e} exceeds {DRIFT_LIMIT:e}"
        )));
    }
    Ok(traj)
}

/// Samples every step `k·dt` for `k·dt ≤ t_max`.
pub fn bmt_integrate(init: &ClassicalState, h: f64, t_max: f64, dt: f64) -> Result<Trajectory> {
    check_step(init, h, dt)?;
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::domain(format!("t_max must be >= 0, got {t_max}")));
    }
    let steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    integrate_grid(init, h, &grid, dt)
}

/// Integrates onto an arbitrary increasing grid starting at `times[0]`,
/// taking equal substeps no longer than `max_dt` between samples.
pub fn bmt_integrate_on_grid(init: &ClassicalState, h: f64, times: &[f64], max_dt: f64) -> Result<Trajectory> {
    check_step(init, h, max_dt)?;
    integrate_grid(init, h, times, max_dt)
}

fn integrate_grid(init: &ClassicalState, h: f64, times: &[f64], max_dt: f64) -> Result<Trajectory> {
    let mut y = [
        init.u[0], init.u[1], init.u[2], init.u[3], init.s[0], init.s[1], init.s[2], init.s[3],
    ];
    let mut states = Vec::with_capacity(times.len());
    if !times.is_empty() {
        states.push(y);
    }
    for w in times.windows(2) {
        let span = w[1] - w[0];
        if !(span > 0.0) {
            return Err(Error::domain("time grid must be strictly increasing"));
        }
        let n = (span / max_dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        for _ in 0..n {
            y = rk4_step(&y, dt, h, init.g_factor);
        }
        states.push(y);
    }
    finish(times.to_vec(), states)
}

/// Lab-time step giving `steps` steps per cyclotron period.
pub fn step_for(init: &ClassicalState, h: f64, steps: u32) -> f64 {
    let omega = init.cyclotron_frequency(h);
    if omega == 0.0 {
        1.0
    } else {
        2.0 * std::f64::consts::PI / (f64::from(steps) * omega)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentDeviation {
    pub name: &'static str,
    pub linf: f64,
    /// Root-mean-square deviation over the samples.
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub components: Vec<ComponentDeviation>,
    pub max_linf: f64,
}

impl Comparison {
    pub fn component(&self, name: &str) -> Option<&ComponentDeviation> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Largest L∞ over the transverse momentum components.
    pub fn transverse_momentum_linf(&self) -> f64 {
        ["Px", "Py"]
            .iter()
            .filter_map(|n| self.component(n))
            .map(|c| c.linf)
            .fold(0.0, f64::max)
    }

    pub fn spin_linf(&self) -> Option<f64> {
        let spin: Vec<f64> = ["S0", "Sx", "Sy", "Sz"]
            .iter()
            .filter_map(|n| self.component(n))
            .map(|c| c.linf)
            .collect();
        (!spin.is_empty()).then(|| spin.into_iter().fold(0.0, f64::max))
    }
}

/// Per-component deviations; spin components are included when both
/// trajectories carry spin.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<Comparison> {
    if a.len() != b.len()
        || a
            .times()
            .iter()
            .zip(b.times())
            .any(|(x, y)| (x - y).abs() > 1e-12 * x.abs().max(1.0))
    {
        return Err(Error::domain("trajectories are sampled on different grids"));
    }
    let mut components = Vec::new();
    let mut push = |name, va: Vec<f64>, vb: Vec<f64>| {
        let d: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).collect();
        let linf = d.iter().copied().fold(0.0, f64::max);
        let l2 = (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt();
        components.push(ComponentDeviation { name, linf, l2 });
    };
    for (i, name) in [(1, "Px"), (2, "Py"), (3, "Pz")] {
        push(
            name,
            a.momentum().iter().map(|p| p[i]).collect(),
            b.momentum().iter().map(|p| p[i]).collect(),
        );
    }
    if let (Some(sa), Some(sb)) = (a.spin(), b.spin()) {
        for (i, name) in [(0, "S0"), (1, "Sx"), (2, "Sy"), (3, "Sz")] {
            push(name, sa.iter().map(|s| s[i]).collect(), sb.iter().map(|s| s[i]).collect());
        }
    }
    let max_linf = components.iter().map(|c| c.linf).fold(0.0, f64::max);
    Ok(Comparison { components, max_linf })
}
