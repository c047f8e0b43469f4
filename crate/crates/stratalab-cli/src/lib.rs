//! Support code for the `stratalab` binary: result cache, search driver and
//! output formatting.

pub mod cache;
pub mod driver;
pub mod output;
