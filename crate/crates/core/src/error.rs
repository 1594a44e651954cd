use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate message_id `{0}`")]
    DuplicateMessage(String),
    #[error("author `{author}` listed with conflicting roles `{first}` and `{second}`")]
    ConflictingRole {
        author: String,
        first: String,
        second: String,
    },
    #[error("unknown role `{0}` (allowed: moderator, spammer, regular)")]
    UnknownRole(String),
    #[error("lexicon word `{0}` is listed as both positive and negative")]
    ConflictingPolarity(String),
    #[error("unknown polarity `{0}` (allowed: positive, negative)")]
    UnknownPolarity(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("window length must be positive, got {0} s")]
    NonPositiveWindow(i64),
    #[error("strategy `{0}` needs {1} labels but none are available")]
    MissingLabels(String, &'static str),
    #[error("invalid removal strategy `{token}`: {reason}")]
    InvalidStrategy { token: String, reason: String },
    #[error("group of size {0} is too small for a t-test (need at least 2)")]
    GroupTooSmall(usize),
    #[error("spammer detection did not converge after {iterations} rounds; oscillating: {oscillating:?}")]
    NoConvergence {
        iterations: usize,
        oscillating: Vec<String>,
    },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}
