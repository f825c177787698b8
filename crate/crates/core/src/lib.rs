//! Exterior probability on poly-discs and the variance of meromorphic
//! functions around a simple pole.
//!
//! The crate pairs an exact symbolic model ([`laurent`]) with a numerical
//! torus-quadrature engine ([`quadrature`]) and checks one against the other.
//! On top of those sit the slice measure ([`slices`]), scale sweeps and the
//! optimal observation scale ([`lens`]), and coordinate changes fixing the
//! origin ([`morph`]).

pub mod expr;
pub mod gen;
pub mod laurent;
pub mod lens;
pub mod matrix;
pub mod morph;
pub mod output;
pub mod quadrature;
pub mod rational;
pub mod slices;
pub mod verify;

pub mod cli;

pub use num_complex::Complex64;
