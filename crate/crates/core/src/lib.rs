//! Spectral toolkit for quasilocal mass estimates of near-round Bartnik data.

pub mod bartnik;
pub mod curvature;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod jet;
pub mod poisson;
pub mod quadrature;
pub mod runner;
pub mod sphere;

pub use error::{Error, Result};
