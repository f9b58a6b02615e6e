//! Critical quantum metrology with the quantum Rabi model.
//!
//! Conventions: `H = ω₀ a†a + (Ω/2) σ_z + λ (a + a†) σ_x`, `g = 2λ/√(ω₀Ω)`, `η = ω₀/Ω`,
//! quadratures `x = (a + a†)/√2`, `p = (a − a†)/(i√2)` with vacuum covariance ½·I.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod dissipative;
pub mod effective;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod output;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{DissipationParams, Estimand, ParamSet, RabiParams, SweepParams};
