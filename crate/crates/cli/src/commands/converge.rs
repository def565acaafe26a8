use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use semiclassical_core::elements::{build_operator_band, BandParams, Observable};
use semiclassical_core::evolution::Expectation;
use semiclassical_core::packet::semiclassical_factor;
use semiclassical_core::{ParticleKind, Trajectory};

use super::trajectory::{measured_factor, transverse_gap};
use crate::config::RunConfig;
use crate::failure::Failure;
use crate::run::{self, Setup};

pub const CSV_HEADER: &str = "N,factor,factor_error,classical_gap";

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub levels: u32,
    pub factor: f64,
    pub factor_error: f64,
    pub classical_gap: f64,
}

fn row(rc: &RunConfig, setup: &Setup, times: &[f64], levels: u32) -> Result<Row, Failure> {
    let packet = setup.packet(rc, levels)?;
    let params = BandParams::from_kinematics(&setup.kin);
    let component = |o| -> Result<Vec<f64>, Failure> {
        let band = build_operator_band(packet.levels(), o, ParticleKind::Spinor, &params, setup.band_mode)?;
        Ok(Expectation::new(&packet, &band, &setup.model)?.real_on(times)?)
    };
    let (px, py) = (component(Observable::Px)?, component(Observable::Py)?);
    let momentum = px
        .iter()
        .zip(&py)
        .map(|(&x, &y)| [setup.kin.energy, x, y, rc.b_z])
        .collect();
    let traj = Trajectory::new(times.to_vec(), momentum, None)?;
    let factor = measured_factor(&traj, setup.kin.b_perp);
    Ok(Row {
        levels,
        factor,
        factor_error: (factor - semiclassical_factor(levels)).abs(),
        classical_gap: transverse_gap(&traj, setup.kin.b_perp, rc.b_z, setup.classical_omega),
    })
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.levels, r.factor, r.factor_error, r.classical_gap
        );
    }
    out
}

/// Rows in ascending N. Fails verification if the gap is not strictly
/// decreasing.
pub fn run(rc: &RunConfig, n_list: &[u32]) -> Result<Vec<Row>, Failure> {
    let mut list = n_list.to_vec();
    list.sort_unstable();
    list.dedup();
    if list.is_empty() {
        return Err(Failure::Config("n-list: at least one N is required".into()));
    }
    for &levels in &list {
        let mut probe = rc.clone();
        probe.levels = levels;
        probe.validate().map_err(|e| Failure::Config(format!("n-list entry {levels}: {e}")))?;
    }
    let setup = Setup::new(rc)?;
    let times = setup.times(rc)?;
    let rows = list
        .par_iter()
        .map(|&levels| row(rc, &setup, &times, levels))
        .collect::<Result<Vec<_>, _>>()?;

    let dir = run::output_dir(rc)?;
    run::write_text(&dir, "converge.csv", &to_csv(&rows))?;
    if let Some(w) = rows.windows(2).find(|w| w[1].classical_gap.partial_cmp(&w[0].classical_gap) != Some(std::cmp::Ordering::Less)) {
        return Err(Failure::Verification(format!(
            "classical gap does not decrease from N={} ({:e}) to N={} ({:e})",
            w[0].levels, w[0].classical_gap, w[1].levels, w[1].classical_gap
        )));
    }
    Ok(rows)
}
