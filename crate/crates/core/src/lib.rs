//! Vortex domains and atmospheres of traveling vortex dipoles and
//! axisymmetric vortex rings.

pub mod domain;
pub mod error;
pub mod field;
pub mod io;
pub mod kernels;
pub mod point;
pub mod roots;
pub mod solver;
pub mod tracer;

pub use error::{Error, Result};
pub use point::{BoundingBox, Point};
