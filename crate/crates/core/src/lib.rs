//! Collective spontaneous emission of a one-dimensional atomic array on a
//! plane gravitational-wave background, and the GW-selective imprint on its
//! decay rate.
//!
//! Units are dimensionless throughout: lengths in `1/omega0` (so the pair
//! phase is `x = 2 pi beta m`), times in `1/gamma0`, rates in `gamma0`. Only
//! [`geometry::to_physical`] and the SI helpers touch physical units.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod emission;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod shape_factor;
pub mod summation;

pub use error::{Error, Result};
pub use geometry::{make_array, ArrayGeometry, AtomicTransition, GwSignal, InitialState, PhysicalArray};
pub use kernels::{GwKernel, KernelEval, KernelMethod, Phase};
pub use shape_factor::{ShapeFactors, SweepGrid};
