//! Numerical laboratory for radial projections of tensor products on R^d x R^d.

pub mod dd;
pub mod experiments;
pub mod error;
pub mod funcspace;
pub mod gaussfit;
pub mod optim;
pub mod quadrature;
pub mod radproj;
pub mod radsets;
pub mod report;
pub mod scalars;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};
pub use scalars::Dimension;
