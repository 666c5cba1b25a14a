//! Numerical laboratory for Degasperis–Procesi peakons.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissible;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod helmholtz;
pub mod lemmas;
pub mod stability;
pub mod sweep;
pub mod waves;

mod spectral;

pub use error::{Error, Result};
pub use grid::{GridFunction, Norms, UniformGrid};
