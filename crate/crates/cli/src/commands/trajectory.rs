use serde::Serialize;

use semiclassical_core::classical::{
    bmt_integrate_on_grid, classical_momentum, compare_trajectories, step_for, ClassicalState,
    Comparison,
};
use semiclassical_core::evolution::{closed_form_trajectory, quantum_trajectory};
use semiclassical_core::packet::semiclassical_factor;
use semiclassical_core::Trajectory;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::run::{self, Setup};

#[derive(Serialize)]
pub struct Summary {
    pub levels: u32,
    pub expected_factor: f64,
    /// `max_t |⟨P_x⟩_t| / b_⊥`.
    pub measured_factor: f64,
    pub factor_error: f64,
    pub quantum_vs_closed_form: Comparison,
    pub quantum_vs_classical: Comparison,
    pub closed_form_vs_classical: Comparison,
    /// L∞ of `(P_x, P_y)` against the unit-factor circular orbit.
    pub transverse_gap: f64,
    /// `b_⊥/N`.
    pub expected_transverse_gap: f64,
}

/// Largest `|P_x|/b_⊥` over the samples.
pub fn measured_factor(traj: &Trajectory, b_perp: f64) -> f64 {
    traj.momentum().iter().map(|p| p[1].abs()).fold(0.0, f64::max) / b_perp
}

/// L∞ deviation of `(P_x, P_y)` from `(−b_⊥ sin ωt, b_⊥ cos ωt)`.
pub fn transverse_gap(traj: &Trajectory, b_perp: f64, b_z: f64, omega: f64) -> f64 {
    traj.times()
        .iter()
        .zip(traj.momentum())
        .map(|(&t, p)| {
            let c = classical_momentum(t, b_perp, b_z, omega);
            (p[1] - c[0]).abs().max((p[2] - c[1]).abs())
        })
        .fold(0.0, f64::max)
}

pub fn run(rc: &RunConfig) -> Result<Summary, Failure> {
    let setup = Setup::new(rc)?;
    let packet = setup.packet(rc, rc.levels)?;
    let bands = setup.bands(&packet)?;
    let times = setup.times(rc)?;
    let f = semiclassical_factor(rc.levels);

    let quantum = quantum_trajectory(&packet, &bands, &setup.model, &times)?;
    let closed = closed_form_trajectory(&setup.kin, f, setup.omega, setup.omega_a, &times)?;
    let init = ClassicalState::from_closed_form(&setup.classical, rc.anomaly)?;
    let dt = step_for(&init, rc.h, rc.steps_per_period);
    let classical = bmt_integrate_on_grid(&init, rc.h, &times, dt)?;

    let dir = run::output_dir(rc)?;
    run::write_text(&dir, "trajectory.csv", &quantum.to_csv())?;
    run::write_text(&dir, "closed_form.csv", &closed.to_csv())?;
    run::write_text(&dir, "classical.csv", &classical.to_csv())?;
    run::write_json(&dir, "manifest.json", &run::manifest("trajectory", rc, &setup, Some(&packet))?)?;

    let b_perp = setup.kin.b_perp;
    let measured = measured_factor(&quantum, b_perp);
    let summary = Summary {
        levels: rc.levels,
        expected_factor: f,
        measured_factor: measured,
        factor_error: (measured - f).abs(),
        quantum_vs_closed_form: compare_trajectories(&quantum, &closed)?,
        quantum_vs_classical: compare_trajectories(&quantum, &classical)?,
        closed_form_vs_classical: compare_trajectories(&closed, &classical)?,
        transverse_gap: transverse_gap(&quantum, b_perp, rc.b_z, setup.classical_omega),
        expected_transverse_gap: b_perp / f64::from(rc.levels),
    };
    run::write_json(&dir, "summary.json", &summary)?;
    Ok(summary)
}
