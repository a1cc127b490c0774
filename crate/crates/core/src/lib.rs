//! Fractional integrals and derivatives on fractional Sobolev spaces, the
//! Mittag-Leffler function, and a modal solver for time-fractional
//! diffusion in one space dimension.

pub mod convolution;
pub mod diffusion;
pub mod error;
pub mod frac_ops;
pub mod grid;
pub mod io;
pub mod mittag_leffler;
pub mod norm_lab;
pub mod quadrature;
pub mod special;
pub mod time_basis;

pub use error::{Error, Result};
pub use diffusion::{EllipticSpec, SpaceTimeField, TimeGrid};
pub use grid::{FractionalOrder, GridFunction, OrderRegime};
pub use time_basis::{Basis, SpectralCoefficients};
