//! Message events, role rosters and the resolved corpus the metrics run on.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn seconds(self) -> i64 {
        self.0
    }
}

/// One forum message as it appears in the log.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageEvent {
    pub message_id: String,
    pub thread_id: String,
    /// `None` for thread-opening posts.
    pub parent_id: Option<String>,
    pub author_id: String,
    pub timestamp: Timestamp,
    /// Externally supplied sentiment in `[0, 1]`.
    pub sentiment: Option<f64>,
    pub text: Option<String>,
    /// Manual content classification: `true` when the message is spam.
    pub spam_label: Option<bool>,
}

impl MessageEvent {
    /// A thread opener with no optional fields set.
    pub fn opener(id: &str, author: &str, timestamp: i64) -> Self {
        MessageEvent {
            message_id: id.to_string(),
            thread_id: id.to_string(),
            parent_id: None,
            author_id: author.to_string(),
            timestamp: Timestamp(timestamp),
            sentiment: None,
            text: None,
            spam_label: None,
        }
    }

    /// A reply to `parent` in thread `thread`.
    pub fn reply(id: &str, thread: &str, parent: &str, author: &str, timestamp: i64) -> Self {
        MessageEvent {
            message_id: id.to_string(),
            thread_id: thread.to_string(),
            parent_id: Some(parent.to_string()),
            author_id: author.to_string(),
            timestamp: Timestamp(timestamp),
            sentiment: None,
            text: None,
            spam_label: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Moderator,
    Spammer,
    Regular,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Moderator => "moderator",
            Role::Spammer => "spammer",
            Role::Regular => "regular",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "moderator" => Ok(Role::Moderator),
            "spammer" => Ok(Role::Spammer),
            "regular" => Ok(Role::Regular),
            _ => Err(Error::UnknownRole(s.to_string())),
        }
    }
}

/// Role assignments; authors not listed are regular.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Roster {
    roles: BTreeMap<String, Role>,
}

impl Roster {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a roster from `(author, role)` pairs. Repeating an author with
    /// the same role is accepted; a conflicting role is an error.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Role)>,
        S: Into<String>,
    {
        let mut roster = Roster::new();
        for (author, role) in pairs {
            roster.insert(author.into(), role)?;
        }
        Ok(roster)
    }

    pub fn insert(&mut self, author: String, role: Role) -> Result<()> {
        match self.roles.get(&author) {
            Some(&existing) if existing != role => Err(Error::ConflictingRole {
                author,
                first: existing.to_string(),
                second: role.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.roles.insert(author, role);
                Ok(())
            }
        }
    }

    pub fn role(&self, author: &str) -> Role {
        self.roles.get(author).copied().unwrap_or(Role::Regular)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Role)> {
        self.roles.iter().map(|(a, r)| (a.as_str(), *r))
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    /// Authors holding `role`, in id order.
    pub fn with_role(&self, role: Role) -> Vec<&str> {
        self.iter()
            .filter(|(_, r)| *r == role)
            .map(|(a, _)| a)
            .collect()
    }

    /// Listed authors for which `has_node` is false. A roster entry for
    /// someone who never posted creates no graph node.
    pub fn absent_authors(&self, has_node: impl Fn(&str) -> bool) -> Vec<&str> {
        self.roles
            .keys()
            .map(String::as_str)
            .filter(|a| !has_node(a))
            .collect()
    }
}

/// Author and time of the message a reply answers.
#[derive(Debug, Clone, PartialEq)]
pub struct ParentRef {
    pub message_id: String,
    pub author_id: String,
    pub timestamp: Timestamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub event: MessageEvent,
    pub parent: Option<ParentRef>,
}

impl Message {
    /// The parent's author when this is a reply to someone else.
    pub fn replied_author(&self) -> Option<&str> {
        self.parent
            .as_ref()
            .map(|p| p.author_id.as_str())
            .filter(|a| *a != self.event.author_id)
    }
}

/// Events ordered by `(timestamp, message_id)` with parents resolved.
///
/// Parent information is resolved once and carried on each reply, so a
/// corpus filtered down to a subset of authors still knows who a surviving
/// reply answered even if the parent message itself was filtered out.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    messages: Vec<Message>,
}

impl Corpus {
    /// Expects events that passed ingest validation. Parent ids that do not
    /// resolve are treated as thread openers.
    pub fn new(mut events: Vec<MessageEvent>) -> Self {
        sort_events(&mut events);
        let mut by_id: BTreeMap<&str, (&str, Timestamp)> = BTreeMap::new();
        for e in &events {
            by_id
                .entry(e.message_id.as_str())
                .or_insert((e.author_id.as_str(), e.timestamp));
        }
        let parents: Vec<Option<ParentRef>> = events
            .iter()
            .map(|e| {
                let pid = e.parent_id.as_deref()?;
                let (author, ts) = by_id.get(pid)?;
                Some(ParentRef {
                    message_id: pid.to_string(),
                    author_id: (*author).to_string(),
                    timestamp: *ts,
                })
            })
            .collect();
        let messages = events
            .into_iter()
            .zip(parents)
            .map(|(event, parent)| Message { event, parent })
            .collect();
        Corpus { messages }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = &MessageEvent> {
        self.messages.iter().map(|m| &m.event)
    }

    /// First and last timestamps, `None` for an empty corpus.
    pub fn time_range(&self) -> Option<(Timestamp, Timestamp)> {
        let first = self.messages.first()?.event.timestamp;
        let last = self.messages.last()?.event.timestamp;
        Some((first, last))
    }

    /// Keeps messages whose author survives and, for replies, whose parent
    /// author survives too.
    pub fn retain_authors(&self, survives: impl Fn(&str) -> bool) -> Corpus {
        let messages = self
            .messages
            .iter()
            .filter(|m| {
                survives(&m.event.author_id)
                    && m.parent.as_ref().is_none_or(|p| survives(&p.author_id))
            })
            .cloned()
            .collect();
        Corpus { messages }
    }

    /// Messages with `start <= timestamp < end`.
    pub fn window(&self, start: Timestamp, end: Timestamp) -> &[Message] {
        let lo = self.messages.partition_point(|m| m.event.timestamp < start);
        let hi = self.messages.partition_point(|m| m.event.timestamp < end);
        &self.messages[lo..hi]
    }
}

/// Timestamp order, ties broken by message id.
pub fn sort_events(events: &mut [MessageEvent]) {
    events.sort_by(|a, b| {
        a.timestamp
            .cmp(&b.timestamp)
            .then_with(|| a.message_id.cmp(&b.message_id))
    });
}
