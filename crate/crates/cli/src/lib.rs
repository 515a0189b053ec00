//! Library surface of the `gch` harness: configuration, run orchestration
//! and sweeps.  The binary in `main.rs` is a thin dispatcher over these.

pub mod config;
pub mod run;
pub mod sweep;
