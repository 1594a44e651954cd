//! File formats, reports and the command line around `forumnet-core`.
//!
//! Message logs are read as comma-separated tables or JSON lines, checked
//! with the core ingest rules and turned into a [`forumnet_core::Corpus`].
//! Reports are plain `", "`-delimited tables; every run also writes
//! `run_manifest.txt` with the configuration and input digests.

pub mod cli;
pub mod error;
pub mod format;
pub mod report;
pub mod synthcfg;

pub use error::{Error, Result};
pub use forumnet_core as core;
