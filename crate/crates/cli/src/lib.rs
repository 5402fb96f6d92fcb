//! Command-line front end for the hexagonal grid stack: text formats for
//! images and kernels, SVG rendering, and the subcommand bodies behind the
//! `hexgrid` binary.

pub mod commands;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod svg;

pub use error::CliError;
