// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod cli;
pub mod error;
pub mod info;
pub mod mc;
pub mod optimize;
pub mod protocol;
pub mod qudit;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use protocol::ProtocolSpec;
