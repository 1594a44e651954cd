//! Spammer detection and moderator fingerprinting.
//!
//! A spammer meets at least two of: (a) activity at or above a high
//! percentile, (b) at most a few answers from authors who are not spammers
//! themselves, (c) content labeled as spam. Condition (b) refers back to the
//! spammer set, so detection iterates to a fixed point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::event::{Corpus, Role, Roster};
use crate::metrics::{Metric, MetricTable};
use crate::stats::{self, TTest};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamConfig {
    /// Condition (a): activity at or above this quantile of the activity
    /// distribution (nearest rank).
    pub activity_percentile: f64,
    /// Condition (b): at most this many answers from non-spammers.
    pub max_nonspam_answers: u32,
}

impl Default for SpamConfig {
    fn default() -> Self {
        SpamConfig {
            activity_percentile: 0.99,
            max_nonspam_answers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Conditions {
    pub high_activity: bool,
    pub few_answers: bool,
    pub spam_content: bool,
}

impl Conditions {
    pub fn count(self) -> u32 {
        u32::from(self.high_activity) + u32::from(self.few_answers) + u32::from(self.spam_content)
    }

    /// Met conditions as letters, e.g. `"ab"`.
    pub fn letters(self) -> String {
        let mut s = String::new();
        for (met, c) in [
            (self.high_activity, 'a'),
            (self.few_answers, 'b'),
            (self.spam_content, 'c'),
        ] {
            if met {
                s.push(c);
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpamVerdict {
    pub node: String,
    pub conditions: Conditions,
    pub is_spammer: bool,
    /// Answers received from authors outside the final spammer set.
    pub nonspam_answers: u32,
    /// Contribution index above 0.7, `None` when the index is undefined.
    pub ci_consistency: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpamReport {
    pub verdicts: Vec<SpamVerdict>,
    pub activity_threshold: u32,
    pub rounds: usize,
    pub warnings: Vec<String>,
}

impl SpamReport {
    pub fn spammers(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|v| v.is_spammer)
            .map(|v| v.node.as_str())
            .collect()
    }
}

/// Nearest-rank quantile: the value at rank `ceil(q * n)` of the sorted
/// sample.
pub fn nearest_rank(values: &[u32], q: f64) -> Option<u32> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = libm::ceil(q * sorted.len() as f64 - 1e-9).max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

pub fn detect_spammers(
    table: &MetricTable,
    corpus: &Corpus,
    config: &SpamConfig,
) -> Result<SpamReport> {
    let n = table.len();
    let index = |id: &str| {
        table
            .nodes
            .binary_search_by(|m| m.node.as_str().cmp(id))
            .ok()
    };

    // answers[v] = (replier, count) for replies by others to v's messages
    let mut answers: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n];
    let mut labeled = vec![(0u32, 0u32); n];
    for m in corpus.messages() {
        let author = index(&m.event.author_id);
        if let (Some(u), Some(label)) = (author, m.event.spam_label) {
            labeled[u].0 += 1;
            labeled[u].1 += u32::from(label);
        }
        if let (Some(x), Some(v)) = (author, m.replied_author().and_then(index)) {
            *answers[v].entry(x).or_insert(0) += 1;
        }
    }

    let activity: Vec<u32> = table.nodes.iter().map(|m| m.activity).collect();
    let threshold = nearest_rank(&activity, config.activity_percentile).unwrap_or(0);
    let high: Vec<bool> = activity.iter().map(|&a| n > 0 && a >= threshold).collect();
    // majority of the node's labeled messages are spam
    let content: Vec<bool> = labeled
        .iter()
        .map(|&(total, spam)| total > 0 && 2 * spam > total)
        .collect();
    let count_answers = |v: usize, spammers: &BTreeSet<usize>| -> u32 {
        answers[v]
            .iter()
            .filter(|(x, _)| !spammers.contains(x))
            .map(|(_, c)| c)
            .sum()
    };

    let all_answers = BTreeSet::new();
    let mut current: BTreeSet<usize> = (0..n)
        .filter(|&v| {
            let few_all = count_answers(v, &all_answers) <= config.max_nonspam_answers;
            content[v] && (high[v] || few_all)
        })
        .collect();

    let cap = n.max(1);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let next: BTreeSet<usize> = (0..n)
            .filter(|&v| {
                let few = count_answers(v, &current) <= config.max_nonspam_answers;
                u32::from(high[v]) + u32::from(few) + u32::from(content[v]) >= 2
            })
            .collect();
        if next == current {
            break;
        }
        if rounds >= cap {
            let oscillating = current
                .symmetric_difference(&next)
                .map(|&v| table.nodes[v].node.clone())
                .collect();
            return Err(Error::NoConvergence {
                iterations: rounds,
                oscillating,
            });
        }
        current = next;
    }

    let mut warnings = Vec::new();
    let verdicts = table
        .nodes
        .iter()
        .enumerate()
        .map(|(v, m)| {
            let nonspam_answers = count_answers(v, &current);
            let conditions = Conditions {
                high_activity: high[v],
                few_answers: nonspam_answers <= config.max_nonspam_answers,
                spam_content: content[v],
            };
            let is_spammer = current.contains(&v);
            let ci_consistency = m.contribution_index.map(|ci| ci > 0.7);
            if is_spammer && ci_consistency != Some(true) {
                warnings.push(format!(
                    "spammer `{}` has contribution index {:?}, not above 0.7",
                    m.node, m.contribution_index
                ));
            }
            SpamVerdict {
                node: m.node.clone(),
                conditions,
                is_spammer,
                nonspam_answers,
                ci_consistency,
            }
        })
        .collect();
    Ok(SpamReport {
        verdicts,
        activity_threshold: threshold,
        rounds,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tendency {
    Higher,
    Lower,
    Equal,
}

impl Tendency {
    pub fn as_str(self) -> &'static str {
        match self {
            Tendency::Higher => "higher",
            Tendency::Lower => "lower",
            Tendency::Equal => "equal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FingerprintOutcome {
    Tested {
        moderator_mean: f64,
        other_mean: f64,
        test: TTest,
        significant: bool,
        direction: Tendency,
    },
    Untested {
        moderators: usize,
        others: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerprintRow {
    pub metric: Metric,
    pub outcome: FingerprintOutcome,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FingerprintReport {
    pub rows: Vec<FingerprintRow>,
}

impl FingerprintReport {
    pub fn row(&self, metric: Metric) -> Option<&FingerprintRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

pub const SIGNIFICANCE: f64 = 0.05;

fn test_groups(metric: Metric, moderators: &[f64], others: &[f64]) -> FingerprintRow {
    let outcome = match stats::welch_t_test(moderators, others) {
        Err(_) => FingerprintOutcome::Untested {
            moderators: moderators.len(),
            others: others.len(),
        },
        Ok(test) => {
            let (mm, om) = (stats::mean(moderators), stats::mean(others));
            let direction = if mm > om {
                Tendency::Higher
            } else if mm < om {
                Tendency::Lower
            } else {
                Tendency::Equal
            };
            FingerprintOutcome::Tested {
                moderator_mean: mm,
                other_mean: om,
                test,
                significant: test.p < SIGNIFICANCE,
                direction,
            }
        }
    };
    FingerprintRow { metric, outcome }
}

fn split_by_role(
    table: &MetricTable,
    roster: &Roster,
    metric: Metric,
    map: impl Fn(f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut moderators = Vec::new();
    let mut others = Vec::new();
    for m in &table.nodes {
        if let Some(x) = m.get(metric) {
            if roster.role(&m.node) == Role::Moderator {
                moderators.push(map(x));
            } else {
                others.push(map(x));
            }
        }
    }
    (moderators, others)
}

/// One Welch test per node-level metric, moderators against everyone else,
/// over nodes where the metric is present.
pub fn moderator_fingerprint(table: &MetricTable, roster: &Roster) -> FingerprintReport {
    let rows = Metric::NODE_LEVEL
        .iter()
        .map(|&metric| {
            let (moderators, others) = split_by_role(table, roster, metric, |x| x);
            test_groups(metric, &moderators, &others)
        })
        .collect();
    FingerprintReport { rows }
}

/// Fingerprint over several networks: each metric is z-normalized within its
/// own network before the groups are pooled. Means in the report are in
/// z units.
pub fn moderator_fingerprint_pooled(networks: &[(&MetricTable, &Roster)]) -> FingerprintReport {
    let rows = Metric::NODE_LEVEL
        .iter()
        .map(|&metric| {
            let mut moderators = Vec::new();
            let mut others = Vec::new();
            for (table, roster) in networks {
                let (mean, sd) = moments(&table.column(metric));
                let z = |x: f64| if sd > 0.0 { (x - mean) / sd } else { 0.0 };
                let (m, o) = split_by_role(table, roster, metric, z);
                moderators.extend(m);
                others.extend(o);
            }
            test_groups(metric, &moderators, &others)
        })
        .collect();
    FingerprintReport { rows }
}

/// Mean and population standard deviation of the present values.
fn moments(column: &[Option<f64>]) -> (f64, f64) {
    let present: Vec<f64> = column.iter().flatten().copied().collect();
    if present.is_empty() {
        return (0.0, 0.0);
    }
    let k = present.len() as f64;
    let mean = present.iter().sum::<f64>() / k;
    let var = present.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
    (mean, libm::sqrt(var))
}

/// Sign each metric carries in the moderator composite.
pub const CANDIDATE_SIGNS: [(Metric, f64); 10] = [
    (Metric::Betweenness, 1.0),
    (Metric::BetweennessOscillations, 1.0),
    (Metric::Degree, 1.0),
    (Metric::Activity, 1.0),
    (Metric::Received, 1.0),
    (Metric::AlterNudges, 1.0),
    (Metric::Complexity, 1.0),
    (Metric::Emotionality, -1.0),
    (Metric::ContributionIndex, -1.0),
    (Metric::EgoNudges, -1.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub node: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateRanking {
    /// Highest composite first; ties by node id.
    pub ranked: Vec<Candidate>,
    /// Metrics left out of the composite because they do not vary.
    pub excluded: Vec<Metric>,
}

/// Composite moderator-likeness: the mean of direction-signed z-scores over
/// the metrics a node has.
pub fn rank_moderator_candidates(table: &MetricTable) -> CandidateRanking {
    let n = table.len();
    let mut sums = vec![0.0; n];
    let mut counts = vec![0u32; n];
    let mut excluded = Vec::new();
    for (metric, sign) in CANDIDATE_SIGNS {
        let column = table.column(metric);
        let (mean, sd) = moments(&column);
        if sd.is_nan() || sd <= 0.0 {
            excluded.push(metric);
            continue;
        }
        for (v, x) in column.iter().enumerate() {
            if let Some(x) = x {
                sums[v] += sign * (x - mean) / sd;
                counts[v] += 1;
            }
        }
    }
    let mut ranked: Vec<Candidate> = table
        .nodes
        .iter()
        .enumerate()
        .map(|(v, m)| Candidate {
            node: m.node.clone(),
            score: if counts[v] > 0 {
                sums[v] / f64::from(counts[v])
            } else {
                0.0
            },
        })
        .collect();
    // table order is id order, so a stable sort keeps the id tie-break
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    CandidateRanking { ranked, excluded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::MessageEvent;
    use crate::graph::ForumGraph;
    use crate::metrics::{compute_node_metrics, MetricsConfig, NodeMetrics};

    fn table_of(events: Vec<MessageEvent>) -> (Corpus, MetricTable) {
        let corpus = Corpus::new(events);
        let graph = ForumGraph::from_corpus(&corpus);
        let table = compute_node_metrics(&corpus, &graph, &MetricsConfig::default()).unwrap();
        (corpus, table)
    }

    #[test]
    fn nearest_rank_quantile() {
        let values: Vec<u32> = (1..=100).collect();
        assert_eq!(nearest_rank(&values, 0.99), Some(99));
        assert_eq!(nearest_rank(&values, 0.5), Some(50));
        assert_eq!(nearest_rank(&[7], 0.99), Some(7));
        assert_eq!(nearest_rank(&[], 0.99), None);
    }

    #[test]
    fn unanswered_heavy_poster_is_flagged() {
        let mut events = Vec::new();
        for i in 0..30 {
            events.push(MessageEvent::opener(&format!("s{i}"), "spam", i));
        }
        // regular users each open a thread answered by the next two users
        let user = |u: i64| format!("user{:03}", u % 120);
        for u in 0..120 {
            let t = format!("u{u}");
            events.push(MessageEvent::opener(&t, &user(u), 1000 + u));
            for k in 1..=2 {
                events.push(MessageEvent::reply(
                    &format!("u{u}r{k}"),
                    &t,
                    &t,
                    &user(u + k),
                    2000 + u,
                ));
            }
        }
        let (corpus, table) = table_of(events);
        let report = detect_spammers(&table, &corpus, &SpamConfig::default()).unwrap();
        assert_eq!(report.spammers(), ["spam"]);
        let v = report.verdicts.iter().find(|v| v.node == "spam").unwrap();
        assert_eq!(v.conditions.letters(), "ab");
        assert_eq!(v.ci_consistency, Some(true));
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn busy_answered_user_is_not_flagged() {
        let mut events = Vec::new();
        for i in 0..40 {
            events.push(MessageEvent::opener(&format!("h{i}"), "busy", i));
            events.push(MessageEvent::reply(
                &format!("r{i}"),
                &format!("h{i}"),
                &format!("h{i}"),
                &format!("user{i:03}"),
                100 + i,
            ));
        }
        let (corpus, table) = table_of(events);
        let report = detect_spammers(&table, &corpus, &SpamConfig::default()).unwrap();
        let v = report.verdicts.iter().find(|v| v.node == "busy").unwrap();
        assert!(v.conditions.high_activity);
        assert!(!v.is_spammer);
    }

    #[test]
    fn fixed_point_discounts_spammer_answers() {
        // x: labeled spam, answered twice by s only; s: labeled spam and never
        // answered. Counting all answers x has 2 > 1, so only s seeds the set;
        // once s is a spammer x has 0 non-spammer answers and joins via {b, c}.
        let mut events = vec![
            MessageEvent::opener("x1", "x", 0),
            MessageEvent::opener("x2", "x", 1),
            MessageEvent::opener("s1", "s", 2),
            MessageEvent::reply("s2", "x1", "x1", "s", 3),
            MessageEvent::reply("s3", "x2", "x2", "s", 4),
            MessageEvent::opener("r1", "r", 5),
        ];
        for e in &mut events {
            if e.author_id != "r" {
                e.spam_label = Some(true);
            }
        }
        let (corpus, table) = table_of(events);
        let config = SpamConfig {
            activity_percentile: 1.0,
            max_nonspam_answers: 1,
        };
        let report = detect_spammers(&table, &corpus, &config).unwrap();
        assert_eq!(report.spammers(), ["s", "x"]);
        let x = report.verdicts.iter().find(|v| v.node == "x").unwrap();
        assert_eq!(x.conditions.letters(), "bc");
        assert_eq!(x.nonspam_answers, 0);
        assert!(report.rounds >= 2);
    }

    fn record(node: &str, degree: u32, ci: f64) -> NodeMetrics {
        NodeMetrics {
            node: node.into(),
            degree,
            activity: 1,
            sent: 1,
            contribution_index: Some(ci),
            ..NodeMetrics::default()
        }
    }

    #[test]
    fn fingerprint_needs_two_per_group() {
        let table = MetricTable {
            nodes: vec![
                record("a", 5, 0.1),
                record("b", 1, 0.9),
                record("c", 2, 0.8),
            ],
        };
        let roster = Roster::from_pairs([("a", Role::Moderator)]).unwrap();
        let report = moderator_fingerprint(&table, &roster);
        assert_eq!(report.rows.len(), Metric::NODE_LEVEL.len());
        assert!(report.rows.iter().all(|r| matches!(
            r.outcome,
            FingerprintOutcome::Untested {
                moderators: 0 | 1,
                ..
            }
        )));
    }

    #[test]
    fn fingerprint_direction_and_degenerate_rows() {
        let table = MetricTable {
            nodes: vec![
                record("m1", 10, 0.1),
                record("m2", 12, 0.2),
                record("u1", 1, 0.8),
                record("u2", 2, 0.9),
                record("u3", 1, 0.7),
            ],
        };
        let roster =
            Roster::from_pairs([("m1", Role::Moderator), ("m2", Role::Moderator)]).unwrap();
        let report = moderator_fingerprint(&table, &roster);
        let FingerprintOutcome::Tested {
            direction,
            significant,
            ..
        } = report.row(Metric::Degree).unwrap().outcome
        else {
            panic!("degree untested");
        };
        assert_eq!(direction, Tendency::Higher);
        assert!(significant);
        let FingerprintOutcome::Tested { direction, .. } =
            report.row(Metric::ContributionIndex).unwrap().outcome
        else {
            panic!("ci untested");
        };
        assert_eq!(direction, Tendency::Lower);
        // activity is 1 everywhere
        let FingerprintOutcome::Tested {
            test, direction, ..
        } = report.row(Metric::Activity).unwrap().outcome
        else {
            panic!("activity untested");
        };
        assert_eq!((test.t, test.p, direction), (0.0, 1.0, Tendency::Equal));
        // ego_art missing everywhere
        assert!(matches!(
            report.row(Metric::EgoArt).unwrap().outcome,
            FingerprintOutcome::Untested {
                moderators: 0,
                others: 0
            }
        ));
    }

    #[test]
    fn identical_nodes_rank_in_id_order() {
        let table = MetricTable {
            nodes: vec![
                record("a", 1, 0.5),
                record("b", 1, 0.5),
                record("c", 1, 0.5),
            ],
        };
        let ranking = rank_moderator_candidates(&table);
        let order: Vec<&str> = ranking.ranked.iter().map(|c| c.node.as_str()).collect();
        assert_eq!(order, ["a", "b", "c"]);
        assert!(ranking.ranked.iter().all(|c| c.score == 0.0));
        assert_eq!(ranking.excluded.len(), CANDIDATE_SIGNS.len());
    }

    #[test]
    fn missing_metrics_use_remaining_only() {
        let mut a = record("a", 4, 0.0);
        let b = record("b", 2, 0.5);
        let c = record("c", 0, 1.0);
        a.complexity = None;
        let table = MetricTable {
            nodes: vec![a, b, c],
        };
        let ranking = rank_moderator_candidates(&table);
        assert_eq!(ranking.ranked[0].node, "a");
        // a: degree z = +1.2247, ci signed z = +1.2247 -> mean 1.2247
        assert!((ranking.ranked[0].score - libm::sqrt(1.5)).abs() < 1e-12);
    }

    #[test]
    fn pooled_fingerprint_z_normalizes_each_network() {
        let net = |scale: u32| MetricTable {
            nodes: vec![
                record("m1", 10 * scale, 0.1),
                record("m2", 12 * scale, 0.2),
                record("u1", scale, 0.8),
                record("u2", 2 * scale, 0.9),
            ],
        };
        let roster =
            Roster::from_pairs([("m1", Role::Moderator), ("m2", Role::Moderator)]).unwrap();
        let (a, b) = (net(1), net(100));
        let pooled = moderator_fingerprint_pooled(&[(&a, &roster), (&b, &roster)]);
        let single = moderator_fingerprint_pooled(&[(&a, &roster)]);
        let t = |r: &FingerprintReport| match r.row(Metric::Degree).unwrap().outcome {
            FingerprintOutcome::Tested { moderator_mean, .. } => moderator_mean,
            _ => f64::NAN,
        };
        assert!((t(&pooled) - t(&single)).abs() < 1e-12);
    }
}
