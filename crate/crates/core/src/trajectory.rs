//! Time-sampled expectation values and their CSV form.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};

/// Four-vector `(x⁰, x¹, x², x³)`, metric (+,−,−,−).
pub type FourVector = [f64; 4];

/// Antisymmetric rank-2 tensor `T^{μν}` indexed `[μ][ν]`.
pub type Tensor = [[f64; 4]; 4];

pub const CSV_HEADER: &str = "t,Px,Py,Pz,S0,Sx,Sy,Sz,resSP,resSS";

/// Minkowski product `a⁰b⁰ − a⃗·b⃗`.
pub fn minkowski(a: &FourVector, b: &FourVector) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Spin invariants at one instant.
#[derive(Copy, Clone, Debug, PartialEq, serde::Serialize)]
pub struct Residuals {
    /// `|S⁰P⁰ − S⃗·P⃗|`.
    pub sp: f64,
    /// `|S⃗² − (S⁰)² − 1|`; the four-spin is spacelike with unit norm.
    pub ss: f64,
}

impl Residuals {
    pub fn of(s: &FourVector, p: &FourVector) -> Self {
        Residuals {
            sp: minkowski(s, p).abs(),
            ss: (-minkowski(s, s) - 1.0).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    momentum: Vec<FourVector>,
    spin: Option<Vec<FourVector>>,
    tensor: Option<Vec<Tensor>>,
    residuals: Option<Vec<Residuals>>,
}

impl Trajectory {
    /// `momentum[k]` is `(P⁰, P_x, P_y, P_z)` at `times[k]`.
    pub fn new(
        times: Vec<f64>,
        momentum: Vec<FourVector>,
        spin: Option<Vec<FourVector>>,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::domain("trajectory needs at least one sample"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("trajectory times must be strictly increasing"));
        }
        if momentum.len() != times.len() {
            return Err(Error::domain(format!(
                "{} momentum samples for {} times",
                momentum.len(),
                times.len()
            )));
        }
        if let Some(s) = &spin {
            if s.len() != times.len() {
                return Err(Error::domain(format!(
                    "{} spin samples for {} times",
                    s.len(),
                    times.len()
                )));
            }
        }
        let residuals = spin.as_ref().map(|s| {
            s.iter()
                .zip(&momentum)
                .map(|(s, p)| Residuals::of(s, p))
                .collect()
        });
        Ok(Trajectory {
            times,
            momentum,
            spin,
            tensor: None,
            residuals,
        })
    }

    /// Attaches `Π^{μν}` computed by `f(S, P)` at every sample.
    pub fn with_tensor(mut self, f: impl Fn(&FourVector, &FourVector) -> Tensor) -> Result<Self> {
        let spin = self
            .spin
            .as_ref()
            .ok_or_else(|| Error::domain("polarization tensor needs a spin trajectory"))?;
        self.tensor = Some(spin.iter().zip(&self.momentum).map(|(s, p)| f(s, p)).collect());
        Ok(self)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn momentum(&self) -> &[FourVector] {
        &self.momentum
    }

    pub fn spin(&self) -> Option<&[FourVector]> {
        self.spin.as_deref()
    }

    pub fn tensor(&self) -> Option<&[Tensor]> {
        self.tensor.as_deref()
    }

    pub fn residuals(&self) -> Option<&[Residuals]> {
        self.residuals.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max − min` of `P_z` over the samples.
    pub fn longitudinal_defect(&self) -> f64 {
        spread(self.momentum.iter().map(|p| p[3]))
    }

    /// `max − min` of `|P_⊥|` over the samples.
    pub fn transverse_defect(&self) -> f64 {
        spread(self.momentum.iter().map(|p| p[1].hypot(p[2])))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 200);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            let p = &self.momentum[k];
            let _ = write!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", self.times[k], p[1], p[2], p[3]);
            match (&self.spin, &self.residuals) {
                (Some(s), Some(r)) => {
                    let (s, r) = (&s[k], &r[k]);
                    let _ = write!(
                        out,
                        ",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        s[0], s[1], s[2], s[3], r.sp, r.ss
                    );
                }
                _ => out.push_str(",,,,,,"),
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}
