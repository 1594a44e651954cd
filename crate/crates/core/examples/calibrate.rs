//! Prints the removal, stability and role-recovery figures for the default
//! generator over seeds `1..=N`, one line per seed.
//!
//! `cargo run --release --example calibrate -- 20 [key=value ...]`

use forumnet_core::experiments::{run_strategy, Baseline, Labels, StabilityReport};
use forumnet_core::roles::{
    detect_spammers, moderator_fingerprint, rank_moderator_candidates, FingerprintOutcome,
    SpamConfig,
};
use forumnet_core::structural;
use forumnet_core::synth::{generate_forum, SynthConfig};
use forumnet_core::{Corpus, Direction, Metric, MetricsConfig, Role};

fn main() {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(5, |s| s.parse().expect("seed count"));
    let mut synth = SynthConfig::default();
    for kv in args {
        let (k, v) = kv.split_once('=').expect("key=value");
        let f: f64 = v.parse().expect("number");
        match k {
            "attachment" => synth.attachment = f,
            "locality" => synth.locality = f,
            "sigma" => synth.activity_sigma = f,
            "cap" => synth.activity_cap = f,
            "power" => synth.n_power_users = f as usize,
            "power_rate" => synth.power_user_rate = f,
            "mod_rate" => synth.moderator_reply_rate = f,
            "spam_rate" => synth.spammer_post_rate = f,
            _ => panic!("unknown key {k}"),
        }
    }
    let config = MetricsConfig::default();
    println!("seed adarp top1_x cc top1_drop bottom_d bottom_n deg_r_bottom deg_r_spam ci_r_bottom ci_r_top10 spam_hits fp mods_in_decile p_degree p_betweenness top1_share");
    for seed in 1..=seeds {
        let (events, roster) = generate_forum(&SynthConfig {
            seed,
            ..synth.clone()
        })
        .unwrap();
        let base = Baseline::new(Corpus::new(events), &config).unwrap();
        let labels = Labels::from_roster(&roster);
        let run = |s: &str| run_strategy(&base, &labels, &s.parse().unwrap(), &config).unwrap();
        let r = |rep: &StabilityReport, m| rep.get(m).unwrap().r().unwrap_or(f64::NAN);
        let (top1, bottom, spam, top10) =
            (run("top1"), run("bottom"), run("spammers"), run("top10"));
        let b = base.summary;

        let report = detect_spammers(&base.metrics, &base.corpus, &SpamConfig::default()).unwrap();
        let flagged = report.spammers();
        let hits = flagged
            .iter()
            .filter(|id| roster.role(id) == Role::Spammer)
            .count();
        let fingerprint = moderator_fingerprint(&base.metrics, &roster);
        let p = |m| match &fingerprint.row(m).unwrap().outcome {
            FingerprintOutcome::Tested {
                test, direction, ..
            } => format!("{:.1e}/{}", test.p, direction.as_str()),
            FingerprintOutcome::Untested { .. } => "untested".into(),
        };
        let ranking = rank_moderator_candidates(&base.metrics);
        let decile = &ranking.ranked[..ranking.ranked.len() / 10];
        let mods = decile
            .iter()
            .filter(|c| roster.role(&c.node) == Role::Moderator)
            .count();

        let mut deg = structural::degrees(&base.graph, Direction::Directed);
        deg.sort_unstable_by(|a, b| b.cmp(a));
        let k = (deg.len() as f64 * 0.01).ceil() as usize;
        let share = deg[..k].iter().sum::<u32>() as f64 / deg.iter().sum::<u32>() as f64;

        println!(
            "{seed} {:.3} {:.2} {:.3} {:.2} {:+.3} {} {:.4} {:.4} {:.3} {:.3} {hits}/{} {} {mods}/{} {} {} {share:.3}",
            b.adarp.unwrap(),
            top1.after.adarp.unwrap() / b.adarp.unwrap(),
            b.clustering.unwrap(),
            1.0 - top1.after.clustering.unwrap() / b.clustering.unwrap(),
            bottom.after.adarp.unwrap() / b.adarp.unwrap() - 1.0,
            bottom.removed_count,
            r(&bottom, Metric::Degree),
            r(&spam, Metric::Degree),
            r(&bottom, Metric::ContributionIndex),
            r(&top10, Metric::ContributionIndex),
            roster.with_role(Role::Spammer).len(),
            flagged.len() - hits,
            roster.with_role(Role::Moderator).len(),
            p(Metric::Degree),
            p(Metric::Betweenness),
        );
    }
}
