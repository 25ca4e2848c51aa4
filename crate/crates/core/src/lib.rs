//! Numerical realization of the joint probability representation of quantum
//! mechanics for a single oscillator degree of freedom.
//!
//! States are carried as tomograms (conditional distributions of a quadrature
//! `X` given the tomographic parameters) and, after multiplication by a prior
//! over those parameters, as joint probability distributions. Observables act
//! through correspondence-rule operators built from grid derivatives and
//! inverse derivatives, and expectation values come from pairing dual symbols
//! with the joint distribution.
//!
//! Module map:
//!
//! - [`gridcalc`]: uniform axes, tabulated functions, stencils, quadrature.
//! - [`states`]: Fock, coherent and squeezed states, density matrices, Wigner functions.
//! - [`tomography`]: symplectic/optical Radon transforms and reconstruction.
//! - [`jointdist`]: parameter priors and Bayes construction of joint distributions.
//! - [`opalg`]: operator expressions and correspondence rules.
//! - [`symbols`]: regular and singular dual symbols, expectation values.
//! - [`dynamics`]: evolution right-hand sides and stationary-state residuals.
//! - [`verify`]: the acceptance suite shared by the CLI and the test target.

pub mod dynamics;
pub mod error;
pub mod gridcalc;
pub mod jointdist;
pub mod opalg;
pub mod states;
pub mod symbols;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};
pub use gridcalc::{Axis, GridFn, Scalar};
pub use num_complex::Complex64;

/// A non-fatal diagnostic attached to a result.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    /// A function handed to an inverse derivative does not vanish at the lower boundary.
    BoundaryDecay,
    /// One or more tomogram slices were rescaled to unit mass.
    SliceRenormalized,
    /// The degenerate μ=ν=0 slice was replaced by a nascent Gaussian.
    NascentOriginSlice,
}

impl Warning {
    pub fn new(kind: WarningKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}
