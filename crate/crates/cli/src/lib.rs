//! Library side of the `spitefree` command: spec-file parsing, command
//! runners and the serializable report format.

pub mod commands;
pub mod error;
pub mod report;
pub mod specfile;
pub mod wire;
