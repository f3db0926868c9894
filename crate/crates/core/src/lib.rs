//! Numerical laboratory for the regularized short pulse equation
//!
//! ```text
//! ∂ₜu − (1/6)∂ₓ(u³) − β∂³ₓu = γP + ε∂²ₓu,   −ε∂²ₓP + ∂ₓP = u
//! ```
//!
//! and its dispersionless, inviscid limit `∂ₜu − ∂ₓ(u³/6) = γP`, `∂ₓP = u`.
//!
//! The core is generic over the working precision through [`Real`]; the
//! `*64` / `*32` aliases below fix it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dispersive;
pub mod error;
pub mod field;
pub mod fv;
pub mod grid;
pub mod initial;
pub mod manufactured;
pub mod nonlocal;
pub mod scalar;
pub mod snapshot;
pub mod spectral;
pub mod stats;
pub mod trajectory;

pub use diagnostics::{
    entropy_residual, entropy_suite, record, scaling_suite, DiagnosticsRecord, EnergyTracker, EntropyBattery,
    EntropyKind, EntropyPair, EntropyReport, ModelCoeffs, RunScaling, ScalingReport, TestBattery,
};
pub use dispersive::{integrate, step, DispersiveParams, RhsTerms, Stepper};
pub use error::{Error, Result};
pub use field::{Field, Lp};
pub use fv::{fv_integrate, fv_step, godunov_flux, rusanov_flux, FluxKind, FvParams};
pub use grid::Grid1D;
pub use initial::{ricker_ic, Ricker};
pub use manufactured::{integrate_manufactured, CosRicker, MmsError, SeparableExact};
pub use nonlocal::{primitive, second_primitive, solve_p_regularized, NonlocalSolution, PrimitiveRule};
pub use scalar::Real;
pub use spectral::{cubic, derivative, from_spectral, to_spectral, SpectralCoeffs};
pub use trajectory::{Outcome, SolverSpec, Trajectory};

pub type Grid64 = Grid1D<f64>;
pub type Field64 = Field<f64>;
pub type Grid32 = Grid1D<f32>;
pub type Field32 = Field<f32>;
