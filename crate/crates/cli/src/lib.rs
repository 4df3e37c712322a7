//! Library surface of the verification CLI: configuration schema and suite
//! dispatch, shared by the binary and the acceptance tests.

pub mod config;
pub mod runner;
