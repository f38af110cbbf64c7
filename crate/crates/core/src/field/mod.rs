pub mod grid;
pub mod steiner;
pub mod vorticity;

pub use grid::GriddedField;
pub use steiner::{check_steiner, SteinerReport};
pub use vorticity::{
    Geometry, JumpCurve, Profile, SupportLayout, TravelingVortex, VorticitySpec, VorticityValue,
};
