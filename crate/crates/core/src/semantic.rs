//! Per-message sentiment and per-node sentiment, emotionality and vocabulary
//! complexity.
//!
//! Sentiment supplied with an event is passed through. Otherwise a lexicon
//! scorer maps `p` positive and `n` negative hits to
//! `(1 + (p - n) / (p + n)) / 2`, or 0.5 without hits. Complexity is the
//! mean surprisal `-ln p(w)` of a message's tokens under corpus-internal
//! word frequencies, so a word is complex when it is rare in the corpus at
//! hand rather than rare in general.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::event::Corpus;
use crate::graph::ForumGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            _ => Err(Error::UnknownPolarity(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    words: BTreeMap<String, Polarity>,
}

impl Lexicon {
    /// Words are lowercased. A word listed with both polarities is an error.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Polarity)>,
        S: AsRef<str>,
    {
        let mut words = BTreeMap::new();
        for (word, polarity) in pairs {
            let word = word.as_ref().trim().to_lowercase();
            match words.get(&word) {
                Some(&p) if p != polarity => return Err(Error::ConflictingPolarity(word)),
                _ => {
                    words.insert(word, polarity);
                }
            }
        }
        Ok(Lexicon { words })
    }

    pub fn polarity(&self, token: &str) -> Option<Polarity> {
        self.words.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercased alphanumeric runs of at least two characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
}

pub fn lexicon_score(text: &str, lexicon: &Lexicon) -> f64 {
    let (mut pos, mut neg) = (0u32, 0u32);
    for token in tokenize(text) {
        match lexicon.polarity(&token) {
            Some(Polarity::Positive) => pos += 1,
            Some(Polarity::Negative) => neg += 1,
            None => {}
        }
    }
    if pos + neg == 0 {
        0.5
    } else {
        let (p, n) = (f64::from(pos), f64::from(neg));
        (1.0 + (p - n) / (p + n)) / 2.0
    }
}

/// One score per corpus message, in corpus order.
pub fn score_sentiment(corpus: &Corpus, lexicon: Option<&Lexicon>) -> Vec<Option<f64>> {
    let empty = Lexicon::default();
    let lexicon = lexicon.unwrap_or(&empty);
    corpus
        .events()
        .map(|e| {
            e.sentiment
                .or_else(|| e.text.as_deref().map(|t| lexicon_score(t, lexicon)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SemanticScores {
    pub sentiment: Option<f64>,
    /// Population standard deviation of the node's message sentiments.
    pub emotionality: Option<f64>,
    pub complexity: Option<f64>,
}

/// Word probabilities over every token in the corpus.
pub fn word_probabilities(corpus: &Corpus) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for e in corpus.events() {
        for token in e.text.as_deref().into_iter().flat_map(tokenize) {
            *counts.entry(token).or_insert(0) += 1;
            total += 1;
        }
    }
    counts
        .into_iter()
        .map(|(w, c)| (w, c as f64 / total as f64))
        .collect()
}

/// Mean `-ln p(w)` over the message's tokens; `None` without tokens.
pub fn message_complexity(text: &str, probabilities: &BTreeMap<String, f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0u32;
    for token in tokenize(text) {
        let p = probabilities.get(&token).copied()?;
        sum += -libm::log(p);
        count += 1;
    }
    (count > 0).then(|| sum / f64::from(count))
}

/// `sentiments` is aligned with `corpus.messages()`.
pub fn node_semantics(
    corpus: &Corpus,
    sentiments: &[Option<f64>],
    graph: &ForumGraph,
) -> Vec<SemanticScores> {
    let n = graph.node_count();
    let probabilities = word_probabilities(corpus);
    let mut sent: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut complexity: Vec<(f64, u32)> = vec![(0.0, 0); n];
    for (m, s) in corpus.messages().iter().zip(sentiments) {
        let Some(u) = graph.index_of(&m.event.author_id) else {
            continue;
        };
        if let Some(s) = s {
            sent[u].push(*s);
        }
        if let Some(c) = m
            .event
            .text
            .as_deref()
            .and_then(|t| message_complexity(t, &probabilities))
        {
            complexity[u].0 += c;
            complexity[u].1 += 1;
        }
    }
    sent.iter()
        .zip(complexity)
        .map(|(values, (csum, ccount))| {
            let (sentiment, emotionality) = if values.is_empty() {
                (None, None)
            } else {
                let k = values.len() as f64;
                let mean = values.iter().sum::<f64>() / k;
                let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
                (Some(mean), Some(libm::sqrt(var)))
            };
            SemanticScores {
                sentiment,
                emotionality,
                complexity: (ccount > 0).then(|| csum / f64::from(ccount)),
            }
        })
        .collect()
}
