pub mod digest;
pub mod error;
pub mod gmw;
pub mod graph;
pub mod harness;
pub mod quantum;
pub mod split;
pub mod transfer;
pub mod transcript;

pub use error::{Error, Result};
