//! The full per-node metric vector and the pass that computes it.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Result;
use crate::event::Corpus;
use crate::graph::{Direction, ForumGraph};
use crate::interaction::{self, DEFAULT_WINDOW_SECS};
use crate::semantic::{self, Lexicon};
use crate::structural;

/// Node-level variables, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    AlterArt,
    EgoArt,
    AlterNudges,
    EgoNudges,
    Activity,
    ContributionIndex,
    Betweenness,
    BetweennessOscillations,
    Closeness,
    Degree,
    Sentiment,
    Emotionality,
    Complexity,
    Received,
}

impl Metric {
    /// The variables tracked by the stability and fingerprint reports.
    pub const NODE_LEVEL: [Metric; 13] = [
        Metric::AlterArt,
        Metric::EgoArt,
        Metric::AlterNudges,
        Metric::EgoNudges,
        Metric::Activity,
        Metric::ContributionIndex,
        Metric::Betweenness,
        Metric::BetweennessOscillations,
        Metric::Closeness,
        Metric::Degree,
        Metric::Sentiment,
        Metric::Emotionality,
        Metric::Complexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AlterArt => "alter_art",
            Metric::EgoArt => "ego_art",
            Metric::AlterNudges => "alter_nudges",
            Metric::EgoNudges => "ego_nudges",
            Metric::Activity => "activity",
            Metric::ContributionIndex => "contribution_index",
            Metric::Betweenness => "betweenness",
            Metric::BetweennessOscillations => "betweenness_oscillations",
            Metric::Closeness => "closeness",
            Metric::Degree => "degree",
            Metric::Sentiment => "sentiment",
            Metric::Emotionality => "emotionality",
            Metric::Complexity => "complexity",
            Metric::Received => "received",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Metric::NODE_LEVEL
            .iter()
            .chain(&[Metric::Received])
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| alloc::format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeMetrics {
    pub node: String,
    pub degree: u32,
    pub closeness: f64,
    pub betweenness: f64,
    pub betweenness_oscillations: u32,
    /// Messages authored (equals `sent`).
    pub activity: u32,
    pub sent: u32,
    pub received: u32,
    pub contribution_index: Option<f64>,
    pub ego_art: Option<f64>,
    pub alter_art: Option<f64>,
    pub ego_nudges: Option<f64>,
    pub alter_nudges: Option<f64>,
    pub sentiment: Option<f64>,
    pub emotionality: Option<f64>,
    pub complexity: Option<f64>,
}

impl NodeMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::AlterArt => self.alter_art,
            Metric::EgoArt => self.ego_art,
            Metric::AlterNudges => self.alter_nudges,
            Metric::EgoNudges => self.ego_nudges,
            Metric::Activity => Some(f64::from(self.activity)),
            Metric::ContributionIndex => self.contribution_index,
            Metric::Betweenness => Some(self.betweenness),
            Metric::BetweennessOscillations => Some(f64::from(self.betweenness_oscillations)),
            Metric::Closeness => Some(self.closeness),
            Metric::Degree => Some(f64::from(self.degree)),
            Metric::Sentiment => self.sentiment,
            Metric::Emotionality => self.emotionality,
            Metric::Complexity => self.complexity,
            Metric::Received => Some(f64::from(self.received)),
        }
    }
}

/// One record per graph node, in node-id order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricTable {
    pub nodes: Vec<NodeMetrics>,
}

impl MetricTable {
    pub fn get(&self, node: &str) -> Option<&NodeMetrics> {
        self.nodes
            .binary_search_by(|m| m.node.as_str().cmp(node))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn column(&self, metric: Metric) -> Vec<Option<f64>> {
        self.nodes.iter().map(|m| m.get(metric)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsConfig {
    pub direction: Direction,
    /// Tumbling window length for betweenness oscillations, seconds.
    pub window_secs: i64,
    pub lexicon: Option<Lexicon>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            direction: Direction::Directed,
            window_secs: DEFAULT_WINDOW_SECS,
            lexicon: None,
        }
    }
}

/// Computes every node-level metric. Structural metrics come from `graph`,
/// message-flow and semantic metrics from `corpus`; the two are joined by
/// node id, so `graph` may hold nodes with no messages in `corpus`.
pub fn compute_node_metrics(
    corpus: &Corpus,
    graph: &ForumGraph,
    config: &MetricsConfig,
) -> Result<MetricTable> {
    let centrality = structural::node_centralities(graph, config.direction);
    let oscillations =
        interaction::betweenness_oscillations(corpus, graph, config.window_secs, config.direction)?;
    let activity = interaction::activity_and_contribution(corpus, graph);
    let art = interaction::response_times(corpus, graph);
    let nudges = interaction::nudges(corpus, graph);
    let sentiments = semantic::score_sentiment(corpus, config.lexicon.as_ref());
    let semantics = semantic::node_semantics(corpus, &sentiments, graph);

    let nodes = (0..graph.node_count())
        .map(|v| NodeMetrics {
            node: graph.id(v).into(),
            degree: centrality[v].degree,
            closeness: centrality[v].closeness,
            betweenness: centrality[v].betweenness,
            betweenness_oscillations: oscillations[v],
            activity: activity[v].sent,
            sent: activity[v].sent,
            received: activity[v].received,
            contribution_index: activity[v].contribution_index,
            ego_art: art[v].ego_art,
            alter_art: art[v].alter_art,
            ego_nudges: nudges[v].ego_nudges,
            alter_nudges: nudges[v].alter_nudges,
            sentiment: semantics[v].sentiment,
            emotionality: semantics[v].emotionality,
            complexity: semantics[v].complexity,
        })
        .collect();
    Ok(MetricTable { nodes })
}
