//! Particle paths in the co-moving frame.

pub mod escape;
pub mod field;
pub mod invariance;
pub mod rk45;
pub mod trace;

pub use escape::{verify_escape, EscapeReport};
pub use field::{MovingFrameField, QuadratureField, TabulatedField};
pub use invariance::{invariance_table, verify_domain_invariance, InvarianceOptions, InvarianceReport};
pub use trace::{
    time_reversal_error, trace, StreamlineTrace, TraceNode, TraceOptions, Verdict,
    DEFAULT_ODE_TOLERANCE,
};
