use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use semiclassical_core::fit::log_log_slope;
use semiclassical_core::laguerre::{momentum_element_quadrature, semiclassical_convergence, MomentumComponent};
use semiclassical_core::{FieldConfig, QuantumNumbers};

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::run;

/// Largest level accepted by the quadrature oracle.
pub const MAX_LEVEL: u32 = 200;

pub const CSV_HEADER: &str = "s,n,component,exact_re,exact_im,semiclassical_re,semiclassical_im,rel_error";

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub s: u32,
    pub n: u32,
    pub component: MomentumComponent,
    pub exact_re: f64,
    pub exact_im: f64,
    pub semiclassical_re: f64,
    pub semiclassical_im: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Exponent {
    pub s: u32,
    pub exponent_x: f64,
    pub exponent_y: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub h: f64,
    pub b_z: f64,
    pub n_list: Vec<u32>,
    pub s_list: Vec<u32>,
    pub exponents: Vec<Exponent>,
    pub rows: Vec<Row>,
}

fn z_row(cfg: &FieldConfig, n: u32, s: u32) -> Result<Row, Failure> {
    let state = QuantumNumbers::scalar(n, s);
    let exact = momentum_element_quadrature(&state, &state, MomentumComponent::Z, cfg)?;
    let b_z = cfg.b_z();
    let scale = if b_z == 0.0 { 1.0 } else { b_z.abs() };
    Ok(Row {
        s,
        n,
        component: MomentumComponent::Z,
        exact_re: exact.re,
        exact_im: exact.im,
        semiclassical_re: b_z,
        semiclassical_im: 0.0,
        rel_error: (exact.re - b_z).hypot(exact.im) / scale,
    })
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let c = match r.component {
            MomentumComponent::X => "x",
            MomentumComponent::Y => "y",
            MomentumComponent::Z => "z",
        };
        let _ = writeln!(
            out,
            "{},{},{c},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.s, r.n, r.exact_re, r.exact_im, r.semiclassical_re, r.semiclassical_im, r.rel_error
        );
    }
    out
}

pub fn compute(rc: &RunConfig, n_list: &[u32], s_list: &[u32]) -> Result<Report, Failure> {
    if n_list.len() < 2 {
        return Err(Failure::Config("n-list: at least two levels are needed for a fit".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n > MAX_LEVEL) {
        return Err(Failure::Config(format!("n-list: n={n} exceeds the quadrature bound {MAX_LEVEL}")));
    }
    if let Some(&s) = s_list.iter().find(|&&s| n_list.iter().any(|&n| n < s || n == 0)) {
        return Err(Failure::Config(format!("s-list: s={s} needs every n >= max(s, 1)")));
    }
    let cfg = FieldConfig::new(rc.h, 0.0, rc.b_z)?;
    let mut rows = Vec::new();
    let mut exponents = Vec::new();
    for &s in s_list {
        let table = semiclassical_convergence(s, rc.h, n_list)?;
        let ns: Vec<f64> = table.iter().map(|r| f64::from(r.n)).collect();
        let ex: Vec<f64> = table.iter().map(|r| r.rel_error_x).collect();
        let ey: Vec<f64> = table.iter().map(|r| r.rel_error_y).collect();
        exponents.push(Exponent {
            s,
            exponent_x: log_log_slope(&ns, &ex)?,
            exponent_y: log_log_slope(&ns, &ey)?,
        });
        let z_rows = n_list
            .par_iter()
            .map(|&n| z_row(&cfg, n, s))
            .collect::<Result<Vec<_>, _>>()?;
        for (r, z) in table.iter().zip(z_rows) {
            for (component, exact, semi, rel) in [
                (MomentumComponent::X, r.exact_x, r.semiclassical_x, r.rel_error_x),
                (MomentumComponent::Y, r.exact_y, r.semiclassical_y, r.rel_error_y),
            ] {
                rows.push(Row {
                    s,
                    n: r.n,
                    component,
                    exact_re: exact.re,
                    exact_im: exact.im,
                    semiclassical_re: semi.re,
                    semiclassical_im: semi.im,
                    rel_error: rel,
                });
            }
            rows.push(z);
        }
    }
    Ok(Report {
        h: rc.h,
        b_z: rc.b_z,
        n_list: n_list.to_vec(),
        s_list: s_list.to_vec(),
        exponents,
        rows,
    })
}

pub fn run(rc: &RunConfig, n_list: &[u32], s_list: &[u32]) -> Result<Report, Failure> {
    let report = compute(rc, n_list, s_list)?;
    let dir = run::output_dir(rc)?;
    run::write_text(&dir, "oracle.csv", &to_csv(&report.rows))?;
    run::write_json(&dir, "oracle.json", &report)?;
    Ok(report)
}
