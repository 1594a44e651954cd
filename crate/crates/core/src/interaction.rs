//! Message-flow metrics: activity and contribution index, ego/alter average
//! response time, ego/alter nudges, and betweenness oscillations.
//!
//! Every function returns one entry per node of the supplied graph, in node
//! order. Events whose author is not a node are ignored, and so are
//! self-replies.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::event::{Corpus, Timestamp};
use crate::graph::{Direction, ForumGraph};
use crate::par;

pub const DEFAULT_WINDOW_SECS: i64 = 7 * 24 * 3600;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Activity {
    /// Messages authored, openers included.
    pub sent: u32,
    /// Replies by other authors to this node's messages.
    pub received: u32,
    /// `(sent - received) / (sent + received)`; `None` when both are zero,
    /// which only happens on a filtered corpus.
    pub contribution_index: Option<f64>,
}

pub fn contribution_index(sent: u32, received: u32) -> Option<f64> {
    let total = sent + received;
    (total > 0).then(|| (f64::from(sent) - f64::from(received)) / f64::from(total))
}

pub fn activity_and_contribution(corpus: &Corpus, graph: &ForumGraph) -> Vec<Activity> {
    let n = graph.node_count();
    let mut sent = vec![0u32; n];
    let mut received = vec![0u32; n];
    for m in corpus.messages() {
        if let Some(u) = graph.index_of(&m.event.author_id) {
            sent[u] += 1;
        }
        if let Some(v) = m.replied_author().and_then(|p| graph.index_of(p)) {
            received[v] += 1;
        }
    }
    sent.into_iter()
        .zip(received)
        .map(|(sent, received)| Activity {
            sent,
            received,
            contribution_index: contribution_index(sent, received),
        })
        .collect()
}

/// Mean reply delays in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResponseTimes {
    /// Over replies this node authored.
    pub ego_art: Option<f64>,
    /// Over replies others made to this node's messages.
    pub alter_art: Option<f64>,
}

#[derive(Clone, Copy, Default)]
struct Mean {
    sum: f64,
    count: u64,
}

impl Mean {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.count += 1;
    }

    fn get(self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

pub fn response_times(corpus: &Corpus, graph: &ForumGraph) -> Vec<ResponseTimes> {
    let n = graph.node_count();
    let mut ego = vec![Mean::default(); n];
    let mut alter = vec![Mean::default(); n];
    for m in corpus.messages() {
        let Some(parent) = m
            .parent
            .as_ref()
            .filter(|p| p.author_id != m.event.author_id)
        else {
            continue;
        };
        let delay = (m.event.timestamp.0 - parent.timestamp.0) as f64;
        if let Some(u) = graph.index_of(&m.event.author_id) {
            ego[u].add(delay);
        }
        if let Some(v) = graph.index_of(&parent.author_id) {
            alter[v].add(delay);
        }
    }
    ego.into_iter()
        .zip(alter)
        .map(|(e, a)| ResponseTimes {
            ego_art: e.get(),
            alter_art: a.get(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Nudges {
    /// Mean pings per closed episode where this node was the pinger.
    pub ego_nudges: Option<f64>,
    /// Mean pings per closed episode where this node was the answerer.
    pub alter_nudges: Option<f64>,
}

/// A reply from `a` to a message by `u` pings `u`; a reply from `u` to a
/// message by `a` answers `a` and closes the pending `(a, u)` episode, whose
/// size is the number of pings since the previous answer. Answers with no
/// pending ping close nothing and trailing unanswered pings are dropped.
pub fn nudges(corpus: &Corpus, graph: &ForumGraph) -> Vec<Nudges> {
    let n = graph.node_count();
    let mut pending: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut ego = vec![Mean::default(); n];
    let mut alter = vec![Mean::default(); n];
    for m in corpus.messages() {
        let Some(target) = m.replied_author() else {
            continue;
        };
        let (Some(x), Some(y)) = (graph.index_of(&m.event.author_id), graph.index_of(target))
        else {
            continue;
        };
        // x answers y: closes the episode in which y was pinging x
        if let Some(count) = pending.remove(&(y, x)).filter(|&c| c > 0) {
            ego[y].add(f64::from(count));
            alter[x].add(f64::from(count));
        }
        *pending.entry((x, y)).or_insert(0) += 1;
    }
    ego.into_iter()
        .zip(alter)
        .map(|(e, a)| Nudges {
            ego_nudges: e.get(),
            alter_nudges: a.get(),
        })
        .collect()
}

/// Strict interior local extrema after merging runs of equal values.
pub fn count_oscillations(series: &[f64]) -> u32 {
    let mut compressed: Vec<f64> = Vec::with_capacity(series.len());
    for &x in series {
        if compressed.last() != Some(&x) {
            compressed.push(x);
        }
    }
    compressed
        .windows(3)
        .filter(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
        .count() as u32
}

/// Consecutive tumbling windows `[start + k*len, start + (k+1)*len)` covering
/// the corpus time range.
pub fn windows(corpus: &Corpus, window_secs: i64) -> Result<Vec<(Timestamp, Timestamp)>> {
    if window_secs <= 0 {
        return Err(Error::NonPositiveWindow(window_secs));
    }
    let Some((first, last)) = corpus.time_range() else {
        return Ok(Vec::new());
    };
    let count = (last.0 - first.0) / window_secs + 1;
    Ok((0..count)
        .map(|k| {
            let start = first.0 + k * window_secs;
            (Timestamp(start), Timestamp(start + window_secs))
        })
        .collect())
}

/// Per-node betweenness series over tumbling windows (0 where the node is
/// absent from a window) and the oscillation count of each series.
pub fn betweenness_series(
    corpus: &Corpus,
    graph: &ForumGraph,
    window_secs: i64,
    direction: Direction,
) -> Result<Vec<Vec<f64>>> {
    let spans = windows(corpus, window_secs)?;
    let per_window = par::map_ordered(&spans, |&(start, end)| {
        let g = ForumGraph::from_messages(corpus.window(start, end));
        let bc = g.betweenness(direction);
        g.ids()
            .iter()
            .zip(bc)
            .filter_map(|(id, b)| graph.index_of(id).map(|v| (v, b)))
            .collect::<Vec<_>>()
    });
    let mut series = vec![vec![0.0; spans.len()]; graph.node_count()];
    for (k, scores) in per_window.into_iter().enumerate() {
        for (v, b) in scores {
            series[v][k] = b;
        }
    }
    Ok(series)
}

pub fn betweenness_oscillations(
    corpus: &Corpus,
    graph: &ForumGraph,
    window_secs: i64,
    direction: Direction,
) -> Result<Vec<u32>> {
    Ok(betweenness_series(corpus, graph, window_secs, direction)?
        .iter()
        .map(|s| count_oscillations(s))
        .collect())
}
