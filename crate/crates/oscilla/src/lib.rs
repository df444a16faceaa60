//! Configuration, file formats and the command-line driver for
//! [`oscilla_core`].

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod output;
pub mod table;

pub use oscilla_core as core;
