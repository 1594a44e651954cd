//! `key = value` configuration for the generator. Keys are the
//! [`SynthConfig`] field names; `start` takes a timestamp and `span` a
//! duration such as `240d`. Blank lines and `#` comments are ignored.

use forumnet_core::synth::SynthConfig;

use crate::format::{format_duration, format_timestamp, parse_duration, parse_timestamp};
use forumnet_core::Timestamp;

pub const KEYS: [&str; 18] = [
    "n_users",
    "n_messages",
    "n_moderators",
    "n_spammers",
    "attachment",
    "moderator_reply_rate",
    "moderator_delay_divisor",
    "spammer_post_rate",
    "n_power_users",
    "power_user_rate",
    "reply_probability",
    "locality",
    "activity_sigma",
    "activity_cap",
    "mean_delay_secs",
    "start",
    "span",
    "seed",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}`: cannot parse `{value}`"))
}

pub fn set(config: &mut SynthConfig, key: &str, value: &str) -> Result<(), String> {
    let value = value.trim();
    match key.trim() {
        "n_users" => config.n_users = num(key, value)?,
        "n_messages" => config.n_messages = num(key, value)?,
        "n_moderators" => config.n_moderators = num(key, value)?,
        "n_spammers" => config.n_spammers = num(key, value)?,
        "attachment" => config.attachment = num(key, value)?,
        "moderator_reply_rate" => config.moderator_reply_rate = num(key, value)?,
        "moderator_delay_divisor" => config.moderator_delay_divisor = num(key, value)?,
        "spammer_post_rate" => config.spammer_post_rate = num(key, value)?,
        "n_power_users" => config.n_power_users = num(key, value)?,
        "power_user_rate" => config.power_user_rate = num(key, value)?,
        "reply_probability" => config.reply_probability = num(key, value)?,
        "locality" => config.locality = num(key, value)?,
        "activity_sigma" => config.activity_sigma = num(key, value)?,
        "activity_cap" => config.activity_cap = num(key, value)?,
        "mean_delay_secs" => config.mean_delay_secs = num(key, value)?,
        "start" => {
            config.start = parse_timestamp(value)
                .ok_or_else(|| format!("`start`: expected YYYY-MM-DDThh:mm:ssZ, got `{value}`"))?
                .0
        }
        "span" => config.span_secs = parse_duration(value).map_err(|e| format!("`span`: {e}"))?,
        "seed" => config.seed = num(key, value)?,
        other => {
            return Err(format!(
                "unknown key `{other}` (known: {})",
                KEYS.join(", ")
            ))
        }
    }
    Ok(())
}

/// Applies a `key=value` assignment.
pub fn assign(config: &mut SynthConfig, assignment: &str) -> Result<(), String> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{assignment}`"))?;
    set(config, key, value)
}

/// Applies a whole file; errors carry the 1-based line number.
pub fn apply_text(config: &mut SynthConfig, text: &str) -> Result<(), String> {
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        assign(config, line).map_err(|e| format!("line {}: {e}", i + 1))?;
    }
    Ok(())
}

/// Every key with its value, in [`KEYS`] order; feeding this back through
/// [`apply_text`] reproduces the config.
pub fn echo(c: &SynthConfig) -> Vec<(String, String)> {
    let values = [
        c.n_users.to_string(),
        c.n_messages.to_string(),
        c.n_moderators.to_string(),
        c.n_spammers.to_string(),
        c.attachment.to_string(),
        c.moderator_reply_rate.to_string(),
        c.moderator_delay_divisor.to_string(),
        c.spammer_post_rate.to_string(),
        c.n_power_users.to_string(),
        c.power_user_rate.to_string(),
        c.reply_probability.to_string(),
        c.locality.to_string(),
        c.activity_sigma.to_string(),
        c.activity_cap.to_string(),
        c.mean_delay_secs.to_string(),
        format_timestamp(Timestamp(c.start)),
        format_duration(c.span_secs),
        c.seed.to_string(),
    ];
    KEYS.iter().map(|k| k.to_string()).zip(values).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let mut c = SynthConfig {
            n_users: 50,
            attachment: 0.75,
            span_secs: 3 * 86_400 + 60,
            seed: 99,
            ..SynthConfig::default()
        };
        c.start = 1_400_000_000;
        let text: String = echo(&c)
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let mut back = SynthConfig::default();
        apply_text(&mut back, &text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_name_line_and_key() {
        let mut c = SynthConfig::default();
        let err = apply_text(&mut c, "# comment\n\nn_users = 10\nbogus = 1\n").unwrap_err();
        assert!(err.starts_with("line 4") && err.contains("bogus"), "{err}");
        assert_eq!(c.n_users, 10);
        assert!(assign(&mut c, "n_users").is_err());
        assert!(assign(&mut c, "span=0d").is_err());
    }
}
