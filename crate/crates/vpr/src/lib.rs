//! File formats, IO and the command line for `vpr-core`.
//!
//! The binary is a thin wrapper around [`cli::main_with`].

pub mod cli;
pub mod config;
pub mod io;
pub mod tables;

/// Minimal viewer runtime inlined into interactive documents. It checks the
/// embedded document and makes screenshots zoomable; the full viewer can be
/// swapped in with `vpr render --runtime`.
pub const VIEWER_STUB: &str = include_str!("../viewer/stub.js");
