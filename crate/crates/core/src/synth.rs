//! Seeded synthetic forums with a heavy-tailed reply structure and planted
//! moderators and spammers.
//!
//! Every user gets one message plus a share of the remaining budget
//! proportional to an activity weight: log-normal for most users and a fixed
//! high multiple of the mean for a handful of power users. Messages are then
//! generated one at a time. A reply picks its target author with probability
//! proportional to `messages(a) * (replies_received(a) + attachment)`, then a
//! uniform message of that author. A fraction of regular replies instead go
//! to a ring neighbour, which gives the network a sparse backbone away from
//! the hubs. Moderators reply more, spread their replies uniformly over
//! authors and answer faster. Spammers post mostly openers, at least as many
//! messages as anyone else, and are never replied to.
//!
//! Events come back in `(timestamp, message_id)` order.
//!
//! The random source is ChaCha8 seeded with `seed_from_u64(seed)`, so a
//! config always yields the same corpus on every platform.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedTreeIndex;
use rand_distr::{Distribution, Exp, Normal, Zipf};

use crate::error::{Error, Result};
use crate::event::{sort_events, MessageEvent, Role, Roster};

/// 2012-01-01T00:00:00Z
pub const DEFAULT_START: i64 = 1_325_376_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_messages: usize,
    pub n_moderators: usize,
    pub n_spammers: usize,
    /// Added to an author's received-reply count in the attachment weight.
    pub attachment: f64,
    /// Moderator activity weight (relative to the mean weight) and reply
    /// probability multiplier.
    pub moderator_reply_rate: f64,
    /// Moderator reply delays are divided by this.
    pub moderator_delay_divisor: f64,
    /// Spammer activity weight, relative to the most active other user.
    pub spammer_post_rate: f64,
    /// Regular users with a fixed, very high activity weight.
    pub n_power_users: usize,
    /// Power-user activity weight, relative to the mean weight.
    pub power_user_rate: f64,
    /// Probability that a regular user's message is a reply.
    pub reply_probability: f64,
    /// Fraction of regular replies sent to a ring neighbour.
    pub locality: f64,
    /// Log-normal sigma of the regular users' activity weight.
    pub activity_sigma: f64,
    /// Upper clamp on the standard-normal draw behind the activity weight.
    pub activity_cap: f64,
    pub mean_delay_secs: f64,
    pub start: i64,
    pub span_secs: i64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 1000,
            n_messages: 20_000,
            n_moderators: 20,
            n_spammers: 10,
            attachment: 2.0,
            moderator_reply_rate: 2.0,
            moderator_delay_divisor: 4.0,
            spammer_post_rate: 1.2,
            n_power_users: 8,
            power_user_rate: 30.0,
            reply_probability: 0.8,
            locality: 0.6,
            activity_sigma: 1.0,
            activity_cap: 2.5,
            mean_delay_secs: 6.0 * 3600.0,
            start: DEFAULT_START,
            span_secs: 240 * 86_400,
            seed: 1,
        }
    }
}

const SPAMMER_REPLY_PROBABILITY: f64 = 0.05;
const VOCABULARY: usize = 4000;
const REGULAR_ZIPF: f64 = 1.1;
const MODERATOR_ZIPF: f64 = 0.8;
const SELF_RETRIES: usize = 8;
const MAX_REPLY_PROBABILITY: f64 = 0.98;

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_users == 0 {
            return bad("n_users must be positive".into());
        }
        if self.n_messages < self.n_users {
            return bad(format!(
                "n_messages ({}) < n_users ({}): every user must post at least once",
                self.n_messages, self.n_users
            ));
        }
        let planted = self.n_moderators + self.n_spammers + self.n_power_users;
        if planted > self.n_users {
            return bad(format!(
                "n_moderators + n_spammers + n_power_users ({planted}) exceeds n_users ({})",
                self.n_users
            ));
        }
        if !(self.attachment >= 0.0 && self.attachment.is_finite()) {
            return bad(format!(
                "attachment must be a finite value >= 0, got {}",
                self.attachment
            ));
        }
        if !(self.power_user_rate > 0.0 && self.power_user_rate.is_finite()) {
            return bad(format!(
                "power_user_rate must be positive, got {}",
                self.power_user_rate
            ));
        }
        for (name, v) in [
            ("moderator_reply_rate", self.moderator_reply_rate),
            ("moderator_delay_divisor", self.moderator_delay_divisor),
            ("spammer_post_rate", self.spammer_post_rate),
        ] {
            if !(v > 1.0 && v.is_finite()) {
                return bad(format!("{name} must be greater than 1, got {v}"));
            }
        }
        for (name, v) in [
            ("reply_probability", self.reply_probability),
            ("locality", self.locality),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.activity_sigma >= 0.0 && self.activity_sigma.is_finite()) {
            return bad(format!(
                "activity_sigma must be >= 0, got {}",
                self.activity_sigma
            ));
        }
        if !self.activity_cap.is_finite() {
            return bad(format!(
                "activity_cap must be finite, got {}",
                self.activity_cap
            ));
        }
        if !(self.mean_delay_secs > 0.0 && self.mean_delay_secs.is_finite()) {
            return bad(format!(
                "mean_delay_secs must be positive, got {}",
                self.mean_delay_secs
            ));
        }
        if self.span_secs <= 0 {
            return bad(format!(
                "span_secs must be positive, got {}",
                self.span_secs
            ));
        }
        Ok(())
    }
}

/// Zero-padded ids, e.g. `u0001` for a thousand users.
fn padded(prefix: char, i: usize, total: usize) -> String {
    let width = format!("{total}").len();
    format!("{prefix}{:0width$}", i + 1)
}

const SYLLABLES: [&str; 20] = [
    "ka", "lo", "mi", "ne", "ru", "ta", "vo", "shi", "pe", "da", "gu", "ri", "so", "fa", "ze",
    "ho", "bi", "nu", "ye", "co",
];

/// A pronounceable word for vocabulary rank `i` (two syllables or more).
fn word(mut i: usize) -> String {
    let mut w = String::new();
    let mut syllables = 0;
    while syllables < 2 || i > 0 {
        w.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
        syllables += 1;
    }
    w
}

/// Splits `budget` over `weights` by largest remainder; ties go to the
/// lower index. Larger weights never get fewer units.
fn apportion(budget: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights.iter().map(|w| budget as f64 * w / total).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| libm::floor(*s) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - libm::floor(shares[a]);
        let fb = shares[b] - libm::floor(shares[b]);
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(budget.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

struct Posted {
    id: String,
    thread: String,
    timestamp: i64,
}

/// Generates the event log and the planted roster (moderators and spammers
/// only; everyone else, power users included, is regular).
pub fn generate_forum(config: &SynthConfig) -> Result<(Vec<MessageEvent>, Roster)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_users;
    let users: Vec<String> = (0..n).map(|i| padded('u', i, n)).collect();

    let mut roles = vec![Role::Regular; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (moderators, rest) = order.split_at(config.n_moderators);
    let (spammers, rest) = rest.split_at(config.n_spammers);
    let power = &rest[..config.n_power_users];
    for &u in moderators {
        roles[u] = Role::Moderator;
    }
    for &u in spammers {
        roles[u] = Role::Spammer;
    }
    let mut roster = Roster::new();
    for (u, &role) in roles.iter().enumerate() {
        if role != Role::Regular {
            roster.insert(users[u].clone(), role)?;
        }
    }

    // activity weights: log-normal, with moderators and power users at fixed
    // multiples of the mean and spammers above everyone else
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    let mut weights: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = standard.sample(&mut rng);
            libm::exp(config.activity_sigma * z.clamp(-3.0, config.activity_cap))
        })
        .collect();
    let mean = weights.iter().sum::<f64>() / n as f64;
    for &u in moderators {
        weights[u] = config.moderator_reply_rate * mean;
    }
    for &u in power {
        weights[u] = config.power_user_rate * mean;
    }
    let top = (0..n)
        .filter(|&u| roles[u] != Role::Spammer)
        .map(|u| weights[u])
        .fold(0.0, f64::max);
    for &u in spammers {
        weights[u] = config.spammer_post_rate * top;
    }
    let extra = apportion(config.n_messages - n, &weights);
    let mut authors: Vec<usize> = Vec::with_capacity(config.n_messages);
    for (u, &k) in extra.iter().enumerate().take(n) {
        authors.extend(core::iter::repeat_n(u, 1 + k));
    }
    authors.shuffle(&mut rng);

    let delay = Exp::new(1.0 / config.mean_delay_secs).expect("positive rate");
    let zipf_regular = Zipf::new(VOCABULARY as f64, REGULAR_ZIPF).expect("valid zipf");
    let zipf_moderator = Zipf::new(VOCABULARY as f64, MODERATOR_ZIPF).expect("valid zipf");
    let bias = Normal::new(0.0, 0.1).expect("valid normal");
    let mood: Vec<f64> = (0..n).map(|_| bias.sample(&mut rng)).collect();

    let end = config.start + config.span_secs - 1;
    let mut posted: Vec<Vec<Posted>> = (0..n).map(|_| Vec::new()).collect();
    let mut received = vec![0u64; n];
    let mut attach = WeightedTreeIndex::new(vec![0.0f64; n]).expect("zero weights are valid");
    // non-spammers who have posted, in order of first post
    let mut targets: Vec<usize> = Vec::new();
    let mut events = Vec::with_capacity(config.n_messages);

    for (k, &a) in authors.iter().enumerate() {
        let role = roles[a];
        let p_reply = match role {
            Role::Spammer => SPAMMER_REPLY_PROBABILITY,
            Role::Moderator => {
                (config.reply_probability * config.moderator_reply_rate).min(MAX_REPLY_PROBABILITY)
            }
            Role::Regular => config.reply_probability,
        };
        let mut target = None;
        if !targets.is_empty() && rng.random_bool(p_reply) {
            target = match role {
                Role::Moderator => Some(targets[rng.random_range(0..targets.len())]),
                Role::Regular if rng.random_bool(config.locality) => {
                    let b = if rng.random_bool(0.5) {
                        (a + 1) % n
                    } else {
                        (a + n - 1) % n
                    };
                    Some(b)
                }
                _ => None,
            }
            .filter(|&b| b != a && roles[b] != Role::Spammer && !posted[b].is_empty());
            if target.is_none() {
                for _ in 0..SELF_RETRIES {
                    match attach.try_sample(&mut rng) {
                        Ok(b) if b != a => {
                            target = Some(b);
                            break;
                        }
                        _ => {}
                    }
                }
            }
        }

        let id = padded('m', k, config.n_messages);
        let mut event = match target {
            Some(b) => {
                let parent = &posted[b][rng.random_range(0..posted[b].len())];
                let divisor = if role == Role::Moderator {
                    config.moderator_delay_divisor
                } else {
                    1.0
                };
                let wait = 1.0 + delay.sample(&mut rng) / divisor;
                let ts = (parent.timestamp + libm::round(wait) as i64)
                    .min(end)
                    .max(parent.timestamp);
                received[b] += 1;
                MessageEvent::reply(&id, &parent.thread, &parent.id, &users[a], ts)
            }
            None => MessageEvent::opener(&id, &users[a], rng.random_range(config.start..=end)),
        };

        let sd = if role == Role::Moderator { 0.06 } else { 0.18 };
        let s: f64 = Normal::new(0.5 + mood[a], sd)
            .expect("valid normal")
            .sample(&mut rng);
        event.sentiment = Some(libm::round(s.clamp(0.0, 1.0) * 1e4) / 1e4);
        let zipf = if role == Role::Moderator {
            &zipf_moderator
        } else {
            &zipf_regular
        };
        let len = rng.random_range(4..=16);
        let words: Vec<String> = (0..len)
            .map(|_| word(zipf.sample(&mut rng) as usize - 1))
            .collect();
        event.text = Some(words.join(" "));
        event.spam_label = Some(role == Role::Spammer);

        if posted[a].is_empty() && role != Role::Spammer {
            targets.push(a);
        }
        posted[a].push(Posted {
            id,
            thread: event.thread_id.clone(),
            timestamp: event.timestamp.0,
        });
        for u in [Some(a), target].into_iter().flatten() {
            if roles[u] != Role::Spammer {
                let w = posted[u].len() as f64 * (received[u] as f64 + config.attachment);
                attach.update(u, w).expect("finite weight");
            }
        }
        events.push(event);
    }
    sort_events(&mut events);
    Ok((events, roster))
}
