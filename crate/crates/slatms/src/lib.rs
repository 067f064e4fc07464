//! Problem language, oracle model and command line for `slatms-core`.

pub mod cli;
pub mod compile;
pub mod lang;
pub mod model;
pub mod report;
