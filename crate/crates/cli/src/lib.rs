//! HTTP service and command line for loftgen.

pub mod api;
pub mod cli;
