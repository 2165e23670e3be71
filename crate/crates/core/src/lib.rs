//! Numerical toolkit for free boundary minimal annuli in the unit ball.
//!
//! The modules follow the classification argument step by step:
//! [`catenoid`] solves and evaluates the critical catenoid, [`analysis`]
//! checks conformal immersions and their fundamental forms, [`weierstrass`]
//! integrates Weierstrass data, [`boundary`] studies the boundary circles and
//! [`spectral`] runs the Laurent/Fourier classification.

// `!(x < bound)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod boundary;
pub mod catenoid;
pub mod cli;
pub mod domain;
pub mod error;
pub mod numerics;
pub mod spectral;
pub mod weierstrass;

pub use error::{Error, Result};
