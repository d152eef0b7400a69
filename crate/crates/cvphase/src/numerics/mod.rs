//! Numerical substrate shared by the physics modules.

pub mod ode;
pub mod optimize;
pub mod quadrature;
pub mod special;

pub use ode::{integrate_ode, DenseSolution, OdeProblem};
pub use quadrature::{gauss_legendre, Grid1D};
pub use special::{airy_ai, erf, hermite_functions, hermite_polynomial};
