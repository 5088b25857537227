//! File formats, command-line front end, and benchmark harness for
//! [`bimatrix_core`].

pub mod bench;
pub mod cli;
pub mod json;
pub mod runtime;
pub mod text;
