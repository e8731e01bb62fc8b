//! Finite metric spaces, net hierarchies and empirical geometric constants.

mod estimates;
mod nets;
mod space;

pub use estimates::*;
pub use nets::*;
pub use space::*;
