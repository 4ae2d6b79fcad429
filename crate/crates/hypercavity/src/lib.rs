//! Protocol language, file formats and command line on top of
//! `hypercavity-core`.

pub mod cli;
pub mod dsl;
pub mod export;
pub mod oracle;
pub mod presets;

pub use dsl::{parse, print, Code, Diagnostic};
