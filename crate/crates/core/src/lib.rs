//! Shifted Funk transforms on the unit sphere: integrals over sections by
//! k-planes through an interior point, their factorization through the
//! Möbius automorphism of the ball, single-center inversion on the even
//! class and two-center reconstruction series.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiment;
pub mod funk;
pub mod harmonics;
pub mod inversion;
pub mod io;
pub mod moebius;
pub mod parity;
pub mod phantoms;
pub mod planes;
pub mod quadrature;
pub mod sphere;
pub mod two_center;

pub use error::{FunkError, Result};
pub use funk::{factorized_funk, forward_funk, SectionField};
pub use moebius::{mobius_apply, reflect, MobiusMap};
pub use planes::{map_central_to_plane, map_plane_to_central, Frame, PlaneFn, PlaneThrough};
pub use sphere::{build_sphere_grid, Center, GridFunction, Point, SphereFn, SphereGrid, SpherePoint};
pub use two_center::{ConvergenceReport, TwoCenterSystem};
