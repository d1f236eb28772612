//! Command-line interface and HTTP session service.

pub mod cli;
pub mod server;
pub mod view;
