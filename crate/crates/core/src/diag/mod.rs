//! Capacities, Harnack-type probes and weight diagnostics on weighted graphs and 1-D densities.

mod ainf;
mod capacity;
mod form;
mod network;
mod poincare;
mod scaling;
mod semimetric;

pub use ainf::*;
pub use capacity::*;
pub use form::*;
pub use network::*;
pub use poincare::*;
pub use scaling::*;
pub use semimetric::*;
