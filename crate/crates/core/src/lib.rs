//! Casimir-type vacuum energy of rotating and magnetised rings.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod error;
pub mod greens;
pub mod regsum;
pub mod spectrum;
pub mod table;
pub mod thermo;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
