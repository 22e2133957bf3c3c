//! Library surface of the CLI crate: the JSON codecs and the scenario
//! catalog, shared between the binary and its integration tests.

pub mod catalog;
pub mod json;
