//! File formats, PSPLIB ingestion, instance generation and the command line
//! front end for `enersched`.

pub mod cli;
pub mod clock;
pub mod error;
pub mod format;
pub mod generate;
pub mod psplib;
pub mod report;
pub mod tariff;

pub use error::CliError;
pub use format::{InstanceFile, Metadata, SolutionFile};
