//! Free-path statistics of a one-dimensional discrete-time Lorentz gas.
//!
//! A point particle starts at `q0` and jumps by a fixed length `v`; it is
//! absorbed at the first step `j >= 1` where `q0 + j*v` lies within `eps/2`
//! of a scatterer. Scatterers sit on a Fibonacci quasicrystal, a general
//! two-gap chain, a periodic lattice or a Poisson point process, all with the
//! same density when built from [`GoldenConstants`].
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature only switches
//! floating point math from `libm` to the platform intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod counter;
pub mod cutproject;
mod error;
pub mod pointsets;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use pointsets::{golden_constants, GoldenConstants, ScattererField};
pub use simulate::{SimConfig, StepHistogram, TrajectoryOutcome};
pub use stats::{SurvivalCurve, TailFit, TailModel};
