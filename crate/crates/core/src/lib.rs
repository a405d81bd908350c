//! Q-tensor dynamics of a nematic liquid crystal in steady shear flow.
//!
//! The crate integrates the order-tensor equation, locates and classifies its
//! periodic orbits through a Poincaré return map, and evaluates the closed-form
//! second-order bifurcation function that predicts which orbits survive weak shear.

// `!(x > 0.0)` is used throughout so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod dynamics;
pub mod models;
pub mod ode;
pub mod poincare;
pub mod tensor;

pub use models::{Alignment, LdgCoefficients, ModelSpec, SpectralData};
pub use tensor::{QTensor, SphericalPoint};
