//! Report tables. Cells are joined by `", "`; ADARP, clustering, average
//! degree and correlations carry 3 decimals, counts and the diameter are
//! integers, and undefined values render as `NA`.

use std::fmt::Write as _;

use forumnet_core::experiments::StabilityReport;
use forumnet_core::roles::{CandidateRanking, FingerprintOutcome, FingerprintReport, SpamReport};
use forumnet_core::{Metric, MetricTable, NetworkSummary, Roster};

pub const NA: &str = "NA";
pub const DELIMITER: &str = ", ";

/// Rows joined by [`DELIMITER`]; a cell holding a comma, quote, line break
/// or edge whitespace is quoted.
#[derive(Debug, Default)]
pub struct Table {
    out: String,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut t = Table::default();
        t.row(header);
        t
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.out.push_str(DELIMITER);
            }
            push_cell(&mut self.out, cell.as_ref());
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

fn push_cell(out: &mut String, cell: &str) {
    let needs_quotes = cell.contains([',', '"', '\n', '\r']) || cell.trim() != cell;
    if needs_quotes {
        out.push('"');
        out.push_str(&cell.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(cell);
    }
}

pub fn fixed(x: Option<f64>, decimals: usize) -> String {
    match x {
        Some(v) if v.is_finite() => {
            let s = format!("{v:.decimals$}");
            // no "-0.000"
            match s.strip_prefix('-') {
                Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
                _ => s,
            }
        }
        Some(v) if v.is_nan() => NA.to_string(),
        Some(v) => if v > 0.0 { "inf" } else { "-inf" }.to_string(),
        None => NA.to_string(),
    }
}

pub fn r3(x: Option<f64>) -> String {
    fixed(x, 3)
}

/// p-values span many orders of magnitude, so they use scientific notation.
pub fn pvalue(p: f64) -> String {
    format!("{p:.3e}")
}

/// The four Table-1 cells: ADARP, clustering, average degree, diameter.
pub fn summary_cells(s: &NetworkSummary) -> [String; 4] {
    [
        r3(s.adarp),
        r3(s.clustering),
        r3(s.avg_degree),
        s.diameter.map_or_else(|| NA.to_string(), |d| d.to_string()),
    ]
}

const SUMMARY_HEADER: [&str; 7] = [
    "strategy",
    "removed_count",
    "removed_pct",
    "adarp",
    "cc",
    "ad",
    "d",
];

fn summary_row(t: &mut Table, label: &str, removed: usize, pct: f64, s: &NetworkSummary) {
    let [adarp, cc, ad, d] = summary_cells(s);
    t.row(&[
        label.to_string(),
        removed.to_string(),
        format!("{:.1}", pct * 100.0),
        adarp,
        cc,
        ad,
        d,
    ]);
}

/// Whole-network row labelled `full`, then one row per strategy with the
/// reduced network's values. `removed_pct` is in percent.
pub fn network_summary(full: &NetworkSummary, reports: &[StabilityReport]) -> String {
    let mut t = Table::new(&SUMMARY_HEADER);
    summary_row(&mut t, "full", 0, 0.0, full);
    for r in reports {
        summary_row(
            &mut t,
            &r.strategy.to_string(),
            r.removed_count,
            r.removed_pct,
            &r.after,
        );
    }
    t.finish()
}

/// One row per metric, one column per strategy, cells are Pearson r.
pub fn stability(reports: &[StabilityReport]) -> String {
    let mut header = vec!["metric".to_string()];
    header.extend(reports.iter().map(|r| r.strategy.to_string()));
    let mut t = Table::new(&header);
    if reports.is_empty() {
        return t.finish();
    }
    for metric in Metric::NODE_LEVEL {
        let mut row = vec![metric.name().to_string()];
        row.extend(
            reports
                .iter()
                .map(|r| r3(r.get(metric).and_then(|m| m.r()))),
        );
        t.row(&row);
    }
    t.finish()
}

pub fn stability_detail(reports: &[StabilityReport]) -> String {
    let mut t = Table::new(&["strategy", "metric", "r", "p", "n", "note"]);
    for r in reports {
        let strategy = r.strategy.to_string();
        for m in &r.correlations {
            let (rv, p, note) = match &m.result {
                Ok(c) => (r3(Some(c.r)), pvalue(c.p), String::new()),
                Err(u) => (NA.to_string(), NA.to_string(), u.to_string()),
            };
            t.row(&[
                strategy.clone(),
                m.metric.name().to_string(),
                rv,
                p,
                m.pairs().to_string(),
                note,
            ]);
        }
    }
    t.finish()
}

pub fn fingerprint(report: &FingerprintReport) -> String {
    let mut t = Table::new(&[
        "metric",
        "mod_mean",
        "other_mean",
        "t",
        "df",
        "p",
        "significant",
        "direction",
    ]);
    for row in &report.rows {
        let name = row.metric.name().to_string();
        match row.outcome {
            FingerprintOutcome::Tested {
                moderator_mean,
                other_mean,
                test,
                significant,
                direction,
            } => t.row(&[
                name,
                fixed(Some(moderator_mean), 4),
                fixed(Some(other_mean), 4),
                fixed(Some(test.t), 3),
                fixed(Some(test.df), 3),
                pvalue(test.p),
                significant.to_string(),
                direction.as_str().to_string(),
            ]),
            FingerprintOutcome::Untested { .. } => {
                let mut row = vec![name];
                row.extend(std::iter::repeat_n(NA.to_string(), 6));
                row.push("untested".to_string());
                t.row(&row);
            }
        }
    }
    t.finish()
}

/// `networks` pairs each ranking with the roster used to label it.
pub fn candidates(networks: &[(&CandidateRanking, &Roster)]) -> String {
    let mut t = Table::new(&["network", "rank", "node", "score", "role"]);
    for (i, (ranking, roster)) in networks.iter().enumerate() {
        for (rank, c) in ranking.ranked.iter().enumerate() {
            t.row(&[
                (i + 1).to_string(),
                (rank + 1).to_string(),
                c.node.clone(),
                fixed(Some(c.score), 4),
                roster.role(&c.node).as_str().to_string(),
            ]);
        }
    }
    t.finish()
}

const NODE_COLUMNS: [&str; 16] = [
    "node",
    "degree",
    "closeness",
    "betweenness",
    "betweenness_oscillations",
    "activity",
    "sent",
    "received",
    "contribution_index",
    "ego_art",
    "alter_art",
    "ego_nudges",
    "alter_nudges",
    "sentiment",
    "emotionality",
    "complexity",
];

pub fn node_metrics(table: &MetricTable) -> String {
    let mut t = Table::new(&NODE_COLUMNS);
    let f = |x: Option<f64>| fixed(x, 6);
    for m in &table.nodes {
        t.row(&[
            m.node.clone(),
            m.degree.to_string(),
            f(Some(m.closeness)),
            f(Some(m.betweenness)),
            m.betweenness_oscillations.to_string(),
            m.activity.to_string(),
            m.sent.to_string(),
            m.received.to_string(),
            f(m.contribution_index),
            f(m.ego_art),
            f(m.alter_art),
            f(m.ego_nudges),
            f(m.alter_nudges),
            f(m.sentiment),
            f(m.emotionality),
            f(m.complexity),
        ]);
    }
    t.finish()
}

/// Nodes meeting at least one spammer condition.
pub fn spam_verdicts(report: &SpamReport) -> String {
    let mut t = Table::new(&[
        "node",
        "conditions",
        "spammer",
        "nonspam_answers",
        "ci_above_0.7",
    ]);
    for v in report.verdicts.iter().filter(|v| v.conditions.count() > 0) {
        t.row(&[
            v.node.clone(),
            v.conditions.letters(),
            v.is_spammer.to_string(),
            v.nonspam_answers.to_string(),
            v.ci_consistency
                .map_or_else(|| NA.to_string(), |b| b.to_string()),
        ]);
    }
    t.finish()
}

/// `key = value` lines in the order given.
pub fn key_values(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}
