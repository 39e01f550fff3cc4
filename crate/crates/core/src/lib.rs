//! Numerical toolkit for GJMS equations `P_k u = f(u)` on hyperbolic space.
//!
//! Every numerical routine is generic over the scalar through [`Real`];
//! [`Dd`] supplies double-double precision where difference stencils of
//! order `2k` would otherwise drown in roundoff.

pub mod classify;
pub mod error;
pub mod gjms;
pub mod hgeom;
pub mod hls;
pub mod kelvin;
pub mod msphere;
pub mod profile;
pub mod quadrature;
pub mod rk;
pub mod scalar;
pub mod shoot;
pub mod specfun;

pub use error::{Error, Result};
pub use hgeom::Dimensions;
pub use num_traits::{Float, FloatConst};
pub use profile::RadialProfile;
pub use scalar::{Dd, Real};

/// Double precision.
pub type R64 = f64;
/// Double-double precision.
pub type R128 = Dd;
/// Radial profile in double precision.
pub type Profile64 = RadialProfile<f64>;
/// Radial profile in double-double precision.
pub type ProfileDd = RadialProfile<Dd>;
