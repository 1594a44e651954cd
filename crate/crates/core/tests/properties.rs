use std::collections::BTreeSet;

use forumnet_core::experiments::{
    run_strategy, select_removal_set, top_count, Baseline, Labels, RemovalStrategy,
};
use forumnet_core::interaction::count_oscillations;
use forumnet_core::stats::{pearson, welch_t_test};
use forumnet_core::{Corpus, MessageEvent, MetricsConfig};
use proptest::prelude::*;
use proptest::sample::Index;

const WORDS: [&str; 6] = ["alpha", "beta", "gamma", "delta", "eps", "zeta"];

/// (author, parent pick, hours since previous, reply?, sentiment percent, word)
type Spec = (usize, Index, u8, bool, u8, usize);

fn build(n_authors: usize, specs: &[Spec]) -> Vec<MessageEvent> {
    let mut events: Vec<MessageEvent> = Vec::new();
    let mut t = 0i64;
    for (i, (author, pick, gap, reply, pct, word)) in specs.iter().enumerate() {
        t += i64::from(*gap) * 3600;
        let id = format!("m{i:03}");
        let author = format!("u{}", author % n_authors);
        let mut e = if *reply && i > 0 {
            let parent = &events[pick.index(i)];
            MessageEvent::reply(
                &id,
                &parent.thread_id.clone(),
                &parent.message_id.clone(),
                &author,
                t,
            )
        } else {
            MessageEvent::opener(&id, &author, t)
        };
        e.sentiment = Some(f64::from(*pct) / 100.0);
        e.text = Some(format!(
            "{} {}",
            WORDS[word % WORDS.len()],
            WORDS[(word / 2) % WORDS.len()]
        ));
        events.push(e);
    }
    events
}

fn corpus() -> impl Strategy<Value = Vec<MessageEvent>> {
    (
        2usize..7,
        prop::collection::vec(
            (
                0usize..7,
                any::<Index>(),
                0u8..200,
                any::<bool>(),
                0u8..=100,
                0usize..12,
            ),
            1..40,
        ),
    )
        .prop_map(|(n, specs)| build(n, &specs))
}

fn ints(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-50i32..50).prop_map(f64::from), len)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn contribution_index_bounds(events in corpus()) {
        let base = Baseline::new(Corpus::new(events), &MetricsConfig::default()).unwrap();
        for m in &base.metrics.nodes {
            let ci = m.contribution_index.expect("every node posted");
            prop_assert!((-1.0..=1.0).contains(&ci));
            prop_assert_eq!(ci == 1.0, m.received == 0, "node {}", m.node);
        }
    }

    #[test]
    fn oscillations_bounded_by_compressed_length(series in prop::collection::vec((0u8..5).prop_map(f64::from), 0..40)) {
        let mut compressed = series.clone();
        compressed.dedup();
        prop_assert!(count_oscillations(&series) as usize <= compressed.len().saturating_sub(2));
    }

    #[test]
    fn pearson_affine_invariance((x, y) in (3usize..20).prop_flat_map(|n| (ints(n..n + 1), ints(n..n + 1))),
                                 a in 0.1f64..10.0, b in -50.0f64..50.0) {
        if let Ok(base) = pearson(&x, &y) {
            let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let r = pearson(&scaled, &y).unwrap();
            prop_assert!((r.r - base.r).abs() < 1e-9, "{} vs {}", r.r, base.r);
            let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assert!((pearson(&flipped, &y).unwrap().r + base.r).abs() < 1e-9);
            prop_assert!((pearson(&y, &x).unwrap().r - base.r).abs() < 1e-12);
        }
        if x.iter().any(|v| *v != x[0]) {
            prop_assert!((pearson(&x, &x).unwrap().r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn welch_shift_scale_and_swap(a in ints(2..15), b in ints(2..15), shift in -1000i32..1000, scale in 1u32..50) {
        let base = welch_t_test(&a, &b).unwrap();
        let c = f64::from(shift);
        let k = f64::from(scale) / 7.0;
        let moved = |g: &[f64]| g.iter().map(|v| v + c).collect::<Vec<_>>();
        let stretched = |g: &[f64]| g.iter().map(|v| v * k).collect::<Vec<_>>();
        for t in [welch_t_test(&moved(&a), &moved(&b)).unwrap(), welch_t_test(&stretched(&a), &stretched(&b)).unwrap()] {
            prop_assert!(close(t.t, base.t, 1e-6), "t {} vs {}", t.t, base.t);
            prop_assert!(close(t.df, base.df, 1e-6));
            prop_assert!(close(t.p, base.p, 1e-6));
        }
        let swapped = welch_t_test(&b, &a).unwrap();
        prop_assert_eq!(swapped.t, -base.t);
        prop_assert_eq!(swapped.df, base.df);
        prop_assert_eq!(swapped.p, base.p);
    }

    #[test]
    fn empty_removal_is_identity(events in corpus()) {
        let config = MetricsConfig::default();
        let base = Baseline::new(Corpus::new(events), &config).unwrap();
        let report = run_strategy(&base, &Labels::default(), &RemovalStrategy::none(), &config).unwrap();
        prop_assert_eq!(report.removed_count, 0);
        prop_assert_eq!(report.after, report.before);
        for c in &report.correlations {
            if let Some(r) = c.r() {
                prop_assert!((r - 1.0).abs() < 1e-12, "{} r = {}", c.metric, r);
            }
        }
    }

    #[test]
    fn union_selection_is_deduplicated_union(events in corpus(), picks in prop::collection::vec(any::<Index>(), 1..4),
                                             pct in 1u32..60) {
        let config = MetricsConfig::default();
        let base = Baseline::new(Corpus::new(events), &config).unwrap();
        let ids = base.graph.ids();
        let labels = Labels {
            moderators: picks.iter().map(|i| ids[i.index(ids.len())].clone()).collect(),
            spammers: BTreeSet::new(),
        };
        let select = |s: &str| {
            select_removal_set(&base.graph, &base.degrees, &labels, &s.parse().unwrap()).unwrap().0
        };
        let top = format!("top{pct}");
        prop_assert_eq!(select(&top).len(), top_count(f64::from(pct) / 100.0, ids.len()));
        for (a, b) in [("moderators", "bottom"), (top.as_str(), "bottom"), (top.as_str(), "moderators")] {
            let (sa, sb) = (select(a), select(b));
            let joint = select(&format!("{a}+{b}"));
            let overlap = sa.intersection(&sb).count();
            prop_assert_eq!(joint.len(), sa.len() + sb.len() - overlap);
            prop_assert_eq!(joint, sa.union(&sb).cloned().collect::<BTreeSet<_>>());
        }
    }
}

/// 83 moderators and 125 bottom nodes sharing 8 members select 200 nodes.
#[test]
fn moderators_plus_bottom_counts() {
    let mut events = Vec::new();
    let ring = |prefix: &str, len: usize, events: &mut Vec<MessageEvent>| {
        for i in 0..len {
            events.push(MessageEvent::opener(
                &format!("{prefix}o{i:03}"),
                &format!("{prefix}{i:03}"),
                i as i64,
            ));
        }
        for i in 0..len {
            let parent = format!("{prefix}o{:03}", (i + 1) % len);
            events.push(MessageEvent::reply(
                &format!("{prefix}r{i:03}"),
                &parent,
                &parent,
                &format!("{prefix}{i:03}"),
                1000 + i as i64,
            ));
        }
    };
    ring("mod", 75, &mut events);
    ring("reg", 100, &mut events);
    for i in 0..125 {
        events.push(MessageEvent::opener(
            &format!("lo{i:03}"),
            &format!("lone{i:03}"),
            i as i64,
        ));
    }
    let config = MetricsConfig::default();
    let base = Baseline::new(Corpus::new(events), &config).unwrap();
    let mut moderators: BTreeSet<String> = (0..75).map(|i| format!("mod{i:03}")).collect();
    moderators.extend((0..8).map(|i| format!("lone{i:03}")));
    let labels = Labels {
        moderators,
        spammers: BTreeSet::new(),
    };
    let count = |s: &str| {
        run_strategy(&base, &labels, &s.parse().unwrap(), &config)
            .unwrap()
            .removed_count
    };
    assert_eq!(count("moderators"), 83);
    assert_eq!(count("bottom"), 125);
    assert_eq!(count("moderators+bottom"), 200);
}
