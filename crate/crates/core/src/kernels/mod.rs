//! Kernels of the Biot–Savart inversion: the planar odd-image logarithm and
//! the axisymmetric ring Green's function, with quadrature oracles.

pub mod elliptic;
pub mod oracle;
pub mod plane;
pub mod quad1d;
pub mod ring;

pub use elliptic::complete_elliptic_ke;
pub use oracle::{plane_kernel_oracle, ring_kernel_oracle, OracleReport};
pub use plane::{kernel2d, kernel2d_gradient};
pub use ring::{
    kernel3d, kernel3d_dr, kernel3d_dr_quadrature, kernel3d_dz, kernel3d_dz_quadrature,
    kernel3d_quadrature, KernelMethod, KernelValue,
};
