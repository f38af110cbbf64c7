//! Stream functions and velocities by quadrature, the steadiness
//! diagnostic, and speed calibration.

pub mod field;
pub mod quadrature;
pub mod steadiness;

pub use field::{FieldSample, FieldSolver, StreamValue, DEFAULT_STREAM_TOLERANCE};
pub use quadrature::SupportQuadrature;
pub use steadiness::{calibrate_speed, steadiness_residual, Calibration, SteadinessSamples, DEFAULT_RESOLUTION};
