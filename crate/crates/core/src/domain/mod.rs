//! Vortex domain extraction: core interval on the axis, centre-speed
//! classification, superlevel-set boundary and measures.

pub mod axis;
pub mod classify;
pub mod extract;

pub use axis::{core_axis_interval, AxisProfile, AxisSample};
pub use classify::{classify, Case, Classification, Topology};
pub use extract::{
    boundary_curve, extract_domain, find_inner_radius, find_level_and_outer_radius, measures,
    sadovskii_test, BoundaryCurve, DomainResult, ExtractOptions, Measures, SadovskiiReport,
};
