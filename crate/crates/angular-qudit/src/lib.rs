//! Scenario files, presets, file formats and the command implementations
//! behind the `angular-qudit` binary.
//!
//! All numerics live in `angular-qudit-core`; this crate only reads and
//! writes files.

pub mod angle;
pub mod commands;
pub mod error;
pub mod formats;
pub mod presets;
pub mod scenario;

pub use crate::angle::Angle;
pub use crate::error::{CliError, CliResult};
pub use crate::scenario::{FileFormat, Scenario};
