//! Simultaneous node-removal strategies and the robustness/stability sweep.
//!
//! Every selection is computed once on the original graph. The reduced
//! network keeps the surviving nodes; structural metrics are recomputed on
//! the reduced graph and message-derived metrics on the messages whose
//! author, and parent author for replies, both survive.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::event::{Corpus, Role, Roster};
use crate::graph::ForumGraph;
use crate::metrics::{compute_node_metrics, Metric, MetricTable, MetricsConfig};
use crate::par;
use crate::stats::{pearson_pairwise, Correlation, Undefined};
use crate::structural::{self, network_summary, NetworkSummary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    /// The `ceil(p * n)` highest-degree nodes, `p` in (0, 1).
    TopPercentile(f64),
    /// Nodes with total degree at most 1.
    Bottom,
    Moderators,
    Spammers,
}

impl Selector {
    fn kind(self) -> u8 {
        match self {
            Selector::TopPercentile(_) => 0,
            Selector::Bottom => 1,
            Selector::Moderators => 2,
            Selector::Spammers => 3,
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::TopPercentile(p) => write!(f, "top{}", p * 100.0),
            Selector::Bottom => f.write_str("bottom"),
            Selector::Moderators => f.write_str("moderators"),
            Selector::Spammers => f.write_str("spammers"),
        }
    }
}

/// A union of distinct selector kinds; no selectors means "remove nothing".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RemovalStrategy {
    parts: Vec<Selector>,
}

pub const STRATEGY_TOKENS: &str = "none, top<percent> (e.g. top1, top5, top10, top2.5), bottom, moderators, spammers; join with '+'";

/// The full sweep: every single selection and the paper-style combinations.
pub const STANDARD_SWEEP: [&str; 10] = [
    "top1",
    "top1+bottom",
    "top5",
    "top10",
    "bottom",
    "moderators",
    "moderators+bottom",
    "spammers",
    "spammers+bottom",
    "moderators+spammers",
];

impl RemovalStrategy {
    pub fn new(parts: Vec<Selector>) -> Result<Self> {
        let token = || {
            parts
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("+")
        };
        let mut kinds = BTreeSet::new();
        for p in &parts {
            if !kinds.insert(p.kind()) {
                return Err(Error::InvalidStrategy {
                    token: token(),
                    reason: "each selector kind may appear once".into(),
                });
            }
            if let Selector::TopPercentile(q) = p {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidStrategy {
                        token: token(),
                        reason: format!("percentile {q} not in (0, 1)"),
                    });
                }
            }
        }
        Ok(RemovalStrategy { parts })
    }

    pub fn none() -> Self {
        RemovalStrategy::default()
    }

    pub fn parts(&self) -> &[Selector] {
        &self.parts
    }

    pub fn needs(&self, selector_kind: Selector) -> bool {
        self.parts.iter().any(|p| p.kind() == selector_kind.kind())
    }
}

impl fmt::Display for RemovalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("none");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for RemovalStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(RemovalStrategy::none());
        }
        let invalid = |reason: String| Error::InvalidStrategy {
            token: s.to_string(),
            reason,
        };
        let mut parts = Vec::new();
        for tok in s.split('+').map(str::trim) {
            let part = match tok {
                "bottom" => Selector::Bottom,
                "moderators" => Selector::Moderators,
                "spammers" => Selector::Spammers,
                _ => {
                    let pct = tok
                        .strip_prefix("top")
                        .and_then(|p| p.parse::<f64>().ok())
                        .ok_or_else(|| {
                            invalid(format!("unknown token `{tok}`; valid: {STRATEGY_TOKENS}"))
                        })?;
                    Selector::TopPercentile(pct / 100.0)
                }
            };
            parts.push(part);
        }
        RemovalStrategy::new(parts)
    }
}

/// Role labels available to label-based selectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Labels {
    pub moderators: BTreeSet<String>,
    pub spammers: BTreeSet<String>,
}

impl Labels {
    pub fn from_roster(roster: &Roster) -> Self {
        let collect = |role| {
            roster
                .with_role(role)
                .into_iter()
                .map(String::from)
                .collect()
        };
        Labels {
            moderators: collect(Role::Moderator),
            spammers: collect(Role::Spammer),
        }
    }
}

/// Node ids selected for removal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RemovalSet(pub BTreeSet<String>);

impl RemovalSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }
}

/// Number of nodes a top-`p` selection takes out of `n`.
pub fn top_count(p: f64, n: usize) -> usize {
    // the epsilon keeps 0.07 * 100 = 7.000000000000001 at 7
    (libm::ceil(p * n as f64 - 1e-9).max(0.0) as usize).min(n)
}

/// Resolves `strategy` on the original graph. `degrees` is aligned with the
/// graph's nodes (see [`structural::degrees`]).
pub fn select_removal_set(
    graph: &ForumGraph,
    degrees: &[u32],
    labels: &Labels,
    strategy: &RemovalStrategy,
) -> Result<RemovalSet> {
    let mut selected = BTreeSet::new();
    for part in strategy.parts() {
        match *part {
            Selector::TopPercentile(p) => {
                let mut order: Vec<usize> = (0..graph.node_count()).collect();
                order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
                let k = top_count(p, graph.node_count());
                selected.extend(order[..k].iter().map(|&v| graph.id(v).to_string()));
            }
            Selector::Bottom => {
                selected.extend(
                    (0..graph.node_count())
                        .filter(|&v| degrees[v] <= 1)
                        .map(|v| graph.id(v).to_string()),
                );
            }
            Selector::Moderators | Selector::Spammers => {
                let (set, what) = if *part == Selector::Moderators {
                    (&labels.moderators, "moderator")
                } else {
                    (&labels.spammers, "spammer")
                };
                let present: Vec<&String> = set
                    .iter()
                    .filter(|id| graph.index_of(id).is_some())
                    .collect();
                if present.is_empty() {
                    return Err(Error::MissingLabels(strategy.to_string(), what));
                }
                selected.extend(present.into_iter().cloned());
            }
        }
    }
    Ok(RemovalSet(selected))
}

pub fn apply_removal(graph: &ForumGraph, removal: &RemovalSet) -> Result<ForumGraph> {
    let mut indices = BTreeSet::new();
    for id in &removal.0 {
        let v = graph
            .index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.clone()))?;
        indices.insert(v);
    }
    Ok(graph.without_nodes(&indices))
}

/// The original network with all of its metrics computed once.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub corpus: Corpus,
    pub graph: ForumGraph,
    pub metrics: MetricTable,
    pub summary: NetworkSummary,
    pub degrees: Vec<u32>,
}

impl Baseline {
    pub fn new(corpus: Corpus, config: &MetricsConfig) -> Result<Self> {
        let graph = ForumGraph::from_corpus(&corpus);
        let metrics = compute_node_metrics(&corpus, &graph, config)?;
        let summary = network_summary(&graph, config.direction);
        let degrees = structural::degrees(&graph, config.direction);
        Ok(Baseline {
            corpus,
            graph,
            metrics,
            summary,
            degrees,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricStability {
    pub metric: Metric,
    pub result: core::result::Result<Correlation, Undefined>,
}

impl MetricStability {
    pub fn r(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|c| c.r)
    }

    /// Complete pairs that entered the correlation.
    pub fn pairs(&self) -> usize {
        match &self.result {
            Ok(c) => c.n,
            Err(u) => u.pairs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub strategy: RemovalStrategy,
    pub removed_count: usize,
    /// `removed_count / n` of the original graph.
    pub removed_pct: f64,
    pub before: NetworkSummary,
    pub after: NetworkSummary,
    pub correlations: Vec<MetricStability>,
}

impl StabilityReport {
    pub fn get(&self, metric: Metric) -> Option<&MetricStability> {
        self.correlations.iter().find(|c| c.metric == metric)
    }
}

/// The reduced network after applying one removal set.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub corpus: Corpus,
    pub graph: ForumGraph,
    pub metrics: MetricTable,
    pub summary: NetworkSummary,
}

pub fn reduce(
    baseline: &Baseline,
    removal: &RemovalSet,
    config: &MetricsConfig,
) -> Result<Reduced> {
    let graph = apply_removal(&baseline.graph, removal)?;
    let corpus = baseline.corpus.retain_authors(|a| !removal.contains(a));
    let metrics = compute_node_metrics(&corpus, &graph, config)?;
    let summary = network_summary(&graph, config.direction);
    Ok(Reduced {
        corpus,
        graph,
        metrics,
        summary,
    })
}

/// Correlates each node-level metric over surviving nodes, before against
/// after, dropping nodes where either value is missing.
pub fn correlate(before: &MetricTable, after: &MetricTable) -> Vec<MetricStability> {
    Metric::NODE_LEVEL
        .iter()
        .map(|&metric| {
            let pairs = after.nodes.iter().map(|m| {
                let orig = before.get(&m.node).and_then(|o| o.get(metric));
                (orig, m.get(metric))
            });
            MetricStability {
                metric,
                result: pearson_pairwise(pairs),
            }
        })
        .collect()
}

pub fn run_strategy(
    baseline: &Baseline,
    labels: &Labels,
    strategy: &RemovalStrategy,
    config: &MetricsConfig,
) -> Result<StabilityReport> {
    let removal = select_removal_set(&baseline.graph, &baseline.degrees, labels, strategy)?;
    let reduced = reduce(baseline, &removal, config)?;
    let n = baseline.graph.node_count();
    Ok(StabilityReport {
        strategy: strategy.clone(),
        removed_count: n - reduced.graph.node_count(),
        removed_pct: if n == 0 {
            0.0
        } else {
            removal.len() as f64 / n as f64
        },
        before: baseline.summary,
        after: reduced.summary,
        correlations: correlate(&baseline.metrics, &reduced.metrics),
    })
}

/// Runs every strategy against the same baseline; reports come back in
/// strategy order.
pub fn stability_analysis(
    baseline: &Baseline,
    labels: &Labels,
    strategies: &[RemovalStrategy],
    config: &MetricsConfig,
) -> Result<Vec<StabilityReport>> {
    par::map_ordered(strategies, |s| run_strategy(baseline, labels, s, config))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::MessageEvent;
    use alloc::vec;

    fn chain() -> Baseline {
        // a -> b -> c, plus isolated d
        let corpus = Corpus::new(vec![
            MessageEvent::opener("c1", "c", 0),
            MessageEvent::reply("b1", "c1", "c1", "b", 10),
            MessageEvent::reply("a1", "c1", "b1", "a", 20),
            MessageEvent::opener("d1", "d", 30),
        ]);
        Baseline::new(corpus, &MetricsConfig::default()).unwrap()
    }

    #[test]
    fn strategy_tokens() {
        let s: RemovalStrategy = "top1+bottom".parse().unwrap();
        assert_eq!(s.parts(), [Selector::TopPercentile(0.01), Selector::Bottom]);
        assert_eq!(s.to_string(), "top1+bottom");
        assert_eq!(
            "top2.5".parse::<RemovalStrategy>().unwrap().to_string(),
            "top2.5"
        );
        assert_eq!(
            "none".parse::<RemovalStrategy>().unwrap(),
            RemovalStrategy::none()
        );
        assert!("bottom+bottom".parse::<RemovalStrategy>().is_err());
        assert!("top0".parse::<RemovalStrategy>().is_err());
        assert!("top100".parse::<RemovalStrategy>().is_err());
        let err = "admins".parse::<RemovalStrategy>().unwrap_err();
        assert!(alloc::format!("{err}").contains("moderators"));
        for tok in STANDARD_SWEEP {
            assert_eq!(tok.parse::<RemovalStrategy>().unwrap().to_string(), tok);
        }
    }

    #[test]
    fn top_count_is_ceiling() {
        assert_eq!(top_count(0.01, 100), 1);
        assert_eq!(top_count(0.07, 100), 7);
        assert_eq!(top_count(0.01, 3200), 32);
        assert_eq!(top_count(0.01, 101), 2);
        assert_eq!(top_count(0.05, 5240), 262);
    }

    #[test]
    fn top_selection_breaks_ties_by_id() {
        let b = chain();
        let s = select_removal_set(
            &b.graph,
            &b.degrees,
            &Labels::default(),
            &"top30".parse().unwrap(),
        )
        .unwrap();
        // degrees a=1 b=2 c=1 d=0; ceil(0.3*4) = 2 -> b, then a (id before c)
        assert_eq!(s.0, BTreeSet::from(["a".to_string(), "b".to_string()]));
    }

    #[test]
    fn bottom_and_labels() {
        let b = chain();
        let bottom = select_removal_set(
            &b.graph,
            &b.degrees,
            &Labels::default(),
            &"bottom".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(
            bottom.0,
            BTreeSet::from(["a".into(), "c".into(), "d".into()])
        );
        let err = select_removal_set(
            &b.graph,
            &b.degrees,
            &Labels::default(),
            &"moderators".parse().unwrap(),
        );
        assert!(matches!(err, Err(Error::MissingLabels(..))));
        let labels = Labels {
            moderators: BTreeSet::from(["b".into(), "ghost".into()]),
            spammers: BTreeSet::new(),
        };
        let union = select_removal_set(
            &b.graph,
            &b.degrees,
            &labels,
            &"moderators+bottom".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(union.len(), 4);
    }

    #[test]
    fn removal_of_middle_node() {
        let b = chain();
        let r = apply_removal(&b.graph, &RemovalSet(BTreeSet::from(["b".into()]))).unwrap();
        assert_eq!(r.ids(), ["a", "c", "d"]);
        assert_eq!(r.arc_count(), 0);
        assert!(apply_removal(&b.graph, &RemovalSet(BTreeSet::from(["zz".into()]))).is_err());
        assert_eq!(
            apply_removal(&b.graph, &RemovalSet::default()).unwrap(),
            b.graph
        );
    }

    #[test]
    fn isolated_removal_keeps_degrees() {
        let b = chain();
        let r = apply_removal(&b.graph, &RemovalSet(BTreeSet::from(["d".into()]))).unwrap();
        assert_eq!(
            structural::degrees(&r, crate::Direction::Directed),
            [1, 2, 1]
        );
    }

    #[test]
    fn identity_strategy_reports_unit_correlations() {
        let b = chain();
        let report = run_strategy(
            &b,
            &Labels::default(),
            &RemovalStrategy::none(),
            &MetricsConfig::default(),
        )
        .unwrap();
        assert_eq!(report.removed_count, 0);
        assert_eq!(report.before, report.after);
        for c in &report.correlations {
            if let Some(r) = c.r() {
                assert!((r - 1.0).abs() < 1e-12, "{:?}", c);
            }
        }
        assert_eq!(report.get(Metric::Degree).unwrap().r(), Some(1.0));
    }
}
