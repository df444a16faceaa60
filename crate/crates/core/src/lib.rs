//! Numerical core for the degenerate Sturm–Liouville problem
//! (v z')' + A v z = 0 with a singular origin.

#![no_std]
// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coefficients;
pub mod criteria;
pub mod critical;
pub mod error;
pub mod gaps;
pub mod quadrature;
pub mod spectral;
pub mod volterra;

pub use coefficients::{
    envelope_log_derivative, make_model, CoefficientProfile, Family, GrowthEnvelope, Jump, ModelKind, Side,
};
pub use error::{Error, Result};
