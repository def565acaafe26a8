//! Semiclassical reconstruction of charge motion and spin precession from
//! wave packets of Landau levels.
//!
//! All quantities are dimensionless: energies in units of m₀c², momenta in
//! m₀c, times in ħ/(m₀c²) and frequencies in m₀c²/ħ. The field enters as
//! `h = μ₀H/(m₀c²)` and the anomalous moment only through `anomaly · h`.
//!
//! Module map:
//! - [`landau`]: level energies, spin coefficients, precession frequencies.
//! - [`laguerre`]: Laguerre functions `I_{n,s}` and the quadrature oracle.
//! - [`elements`]: closed-form band-sparse matrix elements.
//! - [`packet`]: N-level packets and their structure sums.
//! - [`evolution`]: expectation-value engine, closed forms, invariants.
//! - [`classical`]: Lorentz force and BMT reference integrator.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod elements;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod laguerre;
pub mod landau;
pub mod packet;
pub mod trajectory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use landau::{FieldConfig, ParticleKind, QuantumNumbers, Sign, SpinKinematics};
pub use trajectory::Trajectory;
