//! Hyperbolic fillings, weight functions and the weight/measure synthesis pipeline.

mod gentle;
mod graph;
mod synth;
mod weight;

pub use gentle::*;
pub use graph::*;
pub use synth::*;
pub use weight::*;
