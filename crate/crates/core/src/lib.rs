// `!(x > 0.0)` is the NaN-rejecting form used for every parameter check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cone;
pub mod config;
pub mod cross_section;
pub mod error;
pub mod geometry;
pub mod indexsets;
pub mod kernels;
pub mod ode;
pub mod plot;
pub mod propagator;
pub mod quadrature;
pub mod radial;
pub mod runner;

pub use error::{Error, Result};
