//! Point particle E-models on Drinfeld doubles.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: matrices, brackets, bilinear forms, bases and the Yang-Baxter operator.
//! * [`doubles`]: the cotangent double `T*K` and the Lu-Weinstein double `SL(N, C)`.
//! * [`dynamics`]: currents, Hamiltonians, equations of motion and trajectory integration.
//! * [`integrability`]: spectral data, Lax pairs and the sufficient-condition checks.
//! * [`models`]: the concrete catalogue (pendulum, `CP^N`, reduction, bi-Yang-Baxter).
//! * [`cli`]: the batch front end used by the `emodel-lab` binary.

pub mod algebra;
pub mod cli;
pub mod doubles;
pub mod dynamics;
pub mod error;
pub mod integrability;
pub mod models;
pub mod random;

pub use error::{Error, Result};
