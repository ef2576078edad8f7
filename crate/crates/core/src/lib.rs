//! Spectral operators on the unit disk for the synthesis and auditing of
//! quadrature domains driven by sparse boundary measures.
//!
//! The pipeline, end to end: a boundary measure ([`measure`]) feeds a damped
//! fixed-point solve for a boundary log-density ([`solver`]), whose Herglotz
//! data exponentiates and integrates into a conformal map ([`conformal`]);
//! the resulting domain is then checked against the defining quadrature
//! identities and the classical overdetermined-torsion criteria ([`audit`]).
//! Every production operator has an independent brute-force counterpart used
//! by the built-in cross-checks ([`selftest`]).

pub mod audit;
pub mod balayage;
pub mod conformal;
pub mod error;
pub mod fft;
pub mod fourier;
pub mod grid;
pub mod measure;
pub mod schema;
pub mod selftest;
pub mod series;
pub mod solver;
pub mod testkit;

pub use error::{Error, Result};
pub use fourier::TrigPolynomial;
pub use grid::{PolarField, PolarGrid};
pub use measure::MeasureSpec;
pub use num_complex::Complex64;
pub use series::PowerSeries;
