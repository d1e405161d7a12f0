//! Jacobi heat kernels on the solid cone `V^{d+1}` and the conic surface
//! `V_0^{d+1}`: spectral and folded evaluation, the closed-form two-sided
//! estimates, and seeded ratio scans comparing the two.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod numeric;
pub mod orthopoly;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
