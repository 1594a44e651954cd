//! Forum reply-graph analytics.
//!
//! Builds directed reply graphs over author accounts from forum message
//! logs, computes whole-network and per-node metrics (structural, temporal
//! and semantic), simulates simultaneous node-removal strategies and measures
//! how stable every metric stays, and detects spammers and moderators.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, report rendering
//! and the command line live in the `forumnet` companion crate. Enable the
//! `parallel` feature to fan the per-source graph kernels and the strategy
//! sweep out over rayon; results are bit-identical with or without it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod event;
pub mod experiments;
pub mod graph;
pub mod ingest;
pub mod interaction;
pub mod metrics;
pub mod roles;
pub mod semantic;
pub mod stats;
pub mod structural;
pub mod synth;

mod par;

pub use error::{Error, Result};
pub use event::{Corpus, Message, MessageEvent, ParentRef, Role, Roster, Timestamp};
pub use graph::{Direction, ForumGraph};
pub use metrics::{Metric, MetricTable, MetricsConfig, NodeMetrics};
pub use structural::NetworkSummary;
