#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod parallel;
pub mod params;
pub mod period;
pub mod profile;
pub(crate) mod quadrature;
pub(crate) mod roots;
pub mod spectral;
pub mod verify;
pub mod cli;
