//! Entropy-stable modal discontinuous Galerkin discretization of the 2D
//! compressible Navier-Stokes equations on straight-sided triangles.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod dense;
pub mod discretization;
pub mod error;
pub mod inviscid;
pub mod mesh;
pub mod physics;
pub mod reference;
pub mod solver;
pub mod timeloop;
pub mod viscous;

pub use error::{Error, Result};
