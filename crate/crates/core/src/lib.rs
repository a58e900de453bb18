//! Circumcenter of mass of simplicial chains in R^n.
//!
//! The crate computes circumspheres, the power functional of a simplex in
//! two closed forms and by Monte Carlo, the circumcenter of mass of chains
//! and cycle fillings, Euler-line points, and the spherical circumcenter of
//! mass obtained by lifting spherical simplices to cones over the origin.
//! The [`verify`] module runs randomized property suites for each identity,
//! and [`io`] reads chains (JSON or OFF) and writes deterministic reports.

pub mod chain;
pub mod error;
pub mod generate;
pub mod geom;
pub mod io;
pub mod rng;
pub mod simplex;
pub mod spherical;
pub mod verify;

pub use chain::{Chain, Term, WeightedCenter};
pub use error::{GeomError, Result};
pub use geom::{gram_measure, signed_volume, solve_linear, Matrix, Point, Vector};
pub use simplex::{
    pow_simplex_circum, pow_simplex_edges, pow_simplex_mc, power_of_point, PowEstimate, Simplex,
    Sphere,
};
pub use spherical::{SphericalMass, SphericalPoint, SphericalSimplex};
