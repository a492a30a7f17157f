//! Exact computation of isochronous (period) constants for polynomial
//! differential systems on three-dimensional center manifolds.
//!
//! The crate computes the coefficients of the period series of the closed
//! orbits near a nondegenerate monodromic equilibrium, working over the
//! field of rational functions in the system parameters with Gaussian
//! rational coefficients, so that every reported constant is exact.

pub mod error;
pub mod expr;
pub mod format;
pub mod gauss;
pub mod gcd;
pub mod manifold;
pub mod nfengine;
pub mod numverify;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod sysmodel;
