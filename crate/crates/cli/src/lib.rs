//! Experiment harness behind the `lrfhss` binary: sweep specifications,
//! row building, config-file ingestion and CSV/JSON emission.

pub mod emit;
pub mod experiment;
pub mod reproduce;
pub mod specfile;
