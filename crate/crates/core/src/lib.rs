//! Quench dynamics of interacting bosons in the deep-lattice (on-site Kerr)
//! limit, for two coherent-state families: multi-mode Glauber states (MMGS)
//! and generalized (SU(M)) coherent states (GCS).
//!
//! The crate provides closed-form two-point correlators, Loschmidt amplitudes
//! via generating functions, dynamical free-energy densities, the
//! Fourier/projection relations linking the two state families, and
//! phase-space distribution grids.
//!
//! All time arguments are the dimensionless `theta = U * t`; the on-site
//! interaction strength `U` sets the timescale and every observable is
//! `2*pi`-periodic in `theta` (up to a global sign for fixed particle
//! number). [`states::KerrLattice::theta`] maps physical time to `theta`.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std` feature
//! only switches the float backend from `libm` to the platform intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]
// validation comparisons are written in negated form (`!(x > 0.0)`) so NaN
// inputs are rejected; index-based hot loops carry running recurrences that
// iterator adapters would obscure
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod correlators;
mod error;
pub mod glauber;
pub mod loschmidt;
pub mod phasespace;
pub mod poly;
pub mod series;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use series::{ComplexSeries, GridUnit};

pub use num_complex::Complex64;
