#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod data_to_i;
pub mod error;
pub mod forward;
pub mod i_to_data;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod reconstruction;
#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
