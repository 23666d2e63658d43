//! Filesystem-backed collections, external modules and the network and
//! command-line front ends over `gate-core`.

pub mod api;
pub mod cli;
pub mod descriptor;
pub mod engine;
pub mod escape;
pub mod format;
pub mod http;
pub mod process;
pub mod store;
