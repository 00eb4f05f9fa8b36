//! Computable constructions on moduli spaces of singular monopoles.
//!
//! The crate is organised bottom-up:
//!
//! * [`hyperbolic`]: hyperbolic 3-space in the upper half-space model, Busemann
//!   functions, Green's functions and multi-center harmonic potentials.
//! * [`twistor`]: the space of oriented geodesics `P¹×P¹ \ anti-diagonal`, its
//!   real structure, twistor lines and the closest-point map.
//! * [`spectral`]: charge-1 spectral data, the factorisation of the twistor-line
//!   restriction and the lift into `xy = p̃(u)`.
//! * [`metric`]: scalar-flat Kähler metrics on the charge-1 moduli space and a
//!   finite-difference curvature engine.
//! * [`euclidean`]: mini-twistor space `TP¹` and the `L²` patching.
//! * [`symplectic`]: the holomorphic symplectic form on deformation coordinates.
//! * [`scattering`]: fundamental solutions of the scattering equation along
//!   geodesics and the experiments built on them.
//! * [`cli`]: verification suites and data emission for the `monopoles` binary.

pub mod cli;
pub mod error;
pub mod euclidean;
pub mod extended;
pub mod hyperbolic;
pub mod metric;
pub mod poly;
pub mod quadrature;
pub mod scattering;
pub mod series;
pub mod spectral;
pub mod symplectic;
pub mod twistor;

pub use error::{Error, Result};
pub use extended::{ExtComplex, Mobius};
pub use hyperbolic::{MultiCenterPotential, OrientedGeodesic, PointUHS};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
