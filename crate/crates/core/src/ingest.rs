//! Record-level validation and repair of parsed message logs.
//!
//! Field decoding (timestamps, numbers, file layouts) happens in the IO
//! layer; this module applies the corpus-level rules: id uniqueness,
//! sentiment range, parent resolution and ordering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::event::{sort_events, MessageEvent, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Rejected,
    Repaired,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Zero-based record number in the input (header excluded).
    pub record: usize,
    pub message_id: Option<String>,
    pub action: Action,
    pub reason: String,
}

impl Diagnostic {
    pub fn rejected(record: usize, message_id: Option<String>, reason: impl Into<String>) -> Self {
        Diagnostic {
            record,
            message_id,
            action: Action::Rejected,
            reason: reason.into(),
        }
    }

    pub fn repaired(record: usize, message_id: Option<String>, reason: impl Into<String>) -> Self {
        Diagnostic {
            record,
            message_id,
            action: Action::Repaired,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.action {
            Action::Rejected => "rejected",
            Action::Repaired => "repaired",
        };
        write!(f, "record {}", self.record)?;
        if let Some(id) = &self.message_id {
            write!(f, " ({id})")?;
        }
        write!(f, ": {action}: {}", self.reason)
    }
}

/// Accepted events in `(timestamp, message_id)` order plus every diagnostic.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub events: Vec<MessageEvent>,
    pub diagnostics: Vec<Diagnostic>,
    pub input_records: usize,
}

impl Ingested {
    pub fn rejected_count(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.action == Action::Rejected)
            .count()
    }
}

/// Applies the corpus rules to records that decoded cleanly.
///
/// `records` carries each event with its input record number;
/// `diagnostics` holds the decode-stage rejections, and `input_records`
/// the total number of records read.
pub fn validate(
    records: Vec<(usize, MessageEvent)>,
    mut diagnostics: Vec<Diagnostic>,
    input_records: usize,
) -> Result<Ingested> {
    let mut seen = BTreeSet::new();
    for (_, e) in &records {
        if !e.message_id.is_empty() && !seen.insert(e.message_id.as_str()) {
            return Err(Error::DuplicateMessage(e.message_id.clone()));
        }
    }

    let mut kept: Vec<(usize, MessageEvent)> = Vec::with_capacity(records.len());
    for (idx, e) in records {
        let id = Some(e.message_id.clone()).filter(|s| !s.is_empty());
        if e.message_id.is_empty() {
            diagnostics.push(Diagnostic::rejected(idx, None, "missing message_id"));
        } else if e.author_id.is_empty() {
            diagnostics.push(Diagnostic::rejected(idx, id, "missing author_id"));
        } else if e.thread_id.is_empty() {
            diagnostics.push(Diagnostic::rejected(idx, id, "missing thread_id"));
        } else if let Some(s) = e.sentiment.filter(|s| !(0.0..=1.0).contains(s)) {
            diagnostics.push(Diagnostic::rejected(
                idx,
                id,
                format!("sentiment {s} outside [0, 1]"),
            ));
        } else {
            kept.push((idx, e));
        }
    }

    let times: BTreeMap<String, Timestamp> = kept
        .iter()
        .map(|(_, e)| (e.message_id.clone(), e.timestamp))
        .collect();
    for (idx, e) in &mut kept {
        let Some(pid) = e.parent_id.as_deref() else {
            continue;
        };
        let reason = if pid.is_empty() {
            None
        } else if pid == e.message_id {
            Some(format!(
                "parent_id `{pid}` refers to the message itself; treated as thread opener"
            ))
        } else {
            match times.get(pid) {
                None => Some(format!(
                    "unknown parent_id `{pid}`; treated as thread opener"
                )),
                Some(t) if *t > e.timestamp => Some(format!(
                    "parent `{pid}` is later than the reply; treated as thread opener"
                )),
                Some(_) => continue,
            }
        };
        if let Some(reason) = reason {
            diagnostics.push(Diagnostic::repaired(
                *idx,
                Some(e.message_id.clone()),
                reason,
            ));
        }
        e.parent_id = None;
    }

    let mut events: Vec<MessageEvent> = kept.into_iter().map(|(_, e)| e).collect();
    sort_events(&mut events);
    diagnostics.sort_by_key(|d| d.record);
    Ok(Ingested {
        events,
        diagnostics,
        input_records,
    })
}
