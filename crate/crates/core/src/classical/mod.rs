//! Classical one-way protocols: representation, exact error evaluation,
//! brute-force search, sender derandomization and message bundles.

mod bundle;
mod derandomize;
mod evaluate;
pub mod presets;
mod protocol;
mod search;

pub use bundle::{build_message_bundle, BundleEntry, MessageBundle};
pub use derandomize::{derandomize_senders, reduce_seed_set};
pub use evaluate::{evaluate_protocol, input_error, ErrorReport, InputDistribution, InputKey};
pub(crate) use protocol::recipient_index;
pub use protocol::{
    AnswerDistribution, Decoder, DecoderEntry, DecoderKey, OneWayProtocol, Prob, SenderTable,
};
pub use search::{bruteforce_min_cost, BruteForceResult, LengthOutcome, SearchLimits, SearchMode};
