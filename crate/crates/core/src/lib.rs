//! Desk-scale toolkit for the conformal walk dimension.
//!
//! * [`metric`]: finite metric spaces, nets, doubling and perfectness estimates.
//! * [`filling`]: hyperbolic fillings, weight functions and the weight/measure synthesis.
//! * [`pcf`]: self-similar structures, harmonic structures, energies and energy measures.
//! * [`diag`]: capacities and Harnack, doubling, Poincaré and A∞ diagnostics.
//! * [`report`]: configuration, ingestion and the report format behind the `cwdlab` binary.

pub mod diag;
pub mod error;
pub mod filling;
pub mod linalg;
pub mod metric;
pub mod par;
pub mod pcf;
pub mod report;

pub use error::{Error, Result};
