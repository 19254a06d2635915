//! File formats, decoding, CLI and HTTP service on top of `moodpick-core`.

pub mod assets;
pub mod cli;
mod error;
pub mod files;
pub mod media;
pub mod report;
pub mod service;

pub use error::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;
