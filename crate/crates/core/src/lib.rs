//! Subword segmentation for open-vocabulary text encoding.
//!
//! The crate learns byte-pair-encoding merge tables from word frequency
//! tables, applies them to arbitrary text, offers character n-gram
//! segmentation as a baseline, bridges Cyrillic and Latin text with ISO 9
//! transliteration for joint encodings, and scores segmented output with
//! clipped unigram F1 and chrF.

pub mod apply;
pub mod error;
pub mod io;
pub mod joint;
pub mod learn;
pub mod metrics;
pub mod model;
pub mod ngram;
pub mod stats;
pub mod translit;

pub use apply::{
    apply_to_corpus, build_network_vocabulary, Encoder, SymbolVocabulary, UnknownReport,
};
pub use error::{Error, Result};
pub use learn::{learn_bpe, learn_bpe_indexed, LearnConfig, Learned, StopReason};
pub use model::{
    initial_symbolization, revert_line, revert_segmentation, serialize_segmentation, MergeRule,
    MergeTable, SymbolSequence, WordFrequencyTable, CONTINUATION, EOW,
};
