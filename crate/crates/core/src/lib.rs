//! Frames, reproducing pairs and reproducing kernels over finite
//! discretizations of measure spaces.
//!
//! A measure space `(X, μ)` is modelled by [`measure::MeasureSpace`]: a list of
//! atoms plus diffuse segments with closed-form densities. It is rendered into
//! a [`measure::DiscretizedSpace`] on which integrals become weighted sums, and
//! a map `Ψ: X → ℂᵈ` becomes a [`frames::VectorFamily`]: one row per node.
//!
//! Everything in this crate is a pure function of its inputs and needs only
//! `alloc`. IO, file formats and the command line live in the `framelab` crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod frames;
pub mod gallery;
pub mod measure;
pub mod numerics;
pub mod pairs;
pub mod rkhs;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
