//! Merge-table learning by iterated most-frequent-pair merging.
//!
//! Two learners share one contract: [`learn_bpe`] recounts every pair on every
//! iteration and serves as the reference, [`learn_bpe_indexed`] keeps a
//! pair index and a lazily invalidated max-heap and only touches the words
//! that contain the merged pair. Both produce identical merge tables.

mod indexed;
mod naive;

use std::collections::BTreeMap;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::model::{check_word, MergeTable, SymbolSequence, WordFrequencyTable, EOW};

pub use indexed::{learn_bpe_indexed, learn_bpe_indexed_traced};
pub use naive::{learn_bpe, learn_bpe_traced};

pub(crate) type SymbolId = u32;
pub(crate) type Pair = (SymbolId, SymbolId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnConfig {
    /// Maximum number of merges to execute.
    pub num_merges: usize,
    /// Learning stops once the best pair is seen fewer times than this.
    pub min_frequency: u64,
}

impl LearnConfig {
    pub fn new(num_merges: usize) -> Self {
        Self {
            num_merges,
            min_frequency: 2,
        }
    }

    pub fn with_min_frequency(mut self, min_frequency: u64) -> Self {
        self.min_frequency = min_frequency;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_merges == 0 {
            return Err(Error::Config("number of merges must be at least 1".into()));
        }
        if self.min_frequency == 0 {
            return Err(Error::Config("minimum frequency must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// All requested merges were executed.
    Completed,
    /// The most frequent pair fell below the minimum frequency.
    BelowMinFrequency,
    /// Every word is a single symbol.
    NoPairs,
}

/// Full result of a learning run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Learned {
    pub merges: MergeTable,
    /// Weighted count of the selected pair at each iteration.
    pub selected_counts: Vec<u64>,
    pub stop: StopReason,
    /// Each training word's segmentation after the last merge.
    pub segmentation: BTreeMap<String, SymbolSequence>,
}

#[derive(Debug, Default)]
pub(crate) struct Interner {
    ids: FxHashMap<Rc<str>, SymbolId>,
    names: Vec<Rc<str>>,
}

impl Interner {
    pub(crate) fn intern(&mut self, name: &str) -> SymbolId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as SymbolId;
        let name: Rc<str> = Rc::from(name);
        self.names.push(name.clone());
        self.ids.insert(name, id);
        id
    }

    pub(crate) fn get(&self, name: &str) -> Option<SymbolId> {
        self.ids.get(name).copied()
    }

    pub(crate) fn name(&self, id: SymbolId) -> &Rc<str> {
        &self.names[id as usize]
    }

    pub(crate) fn merged(&mut self, (left, right): Pair) -> SymbolId {
        let joined = format!("{}{}", self.name(left), self.name(right));
        self.intern(&joined)
    }
}

/// Training words as symbol sequences, weighted by frequency.
#[derive(Debug, Default)]
pub struct Vocab {
    pub(crate) interner: Interner,
    pub(crate) words: Vec<Vec<SymbolId>>,
    pub(crate) freqs: Vec<u64>,
}

impl Vocab {
    /// Symbolizes every word of the table (characters plus detached `</w>`).
    pub fn from_table(table: &WordFrequencyTable) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut vocab = Vocab::default();
        for (word, freq) in table.iter() {
            check_word(word)?;
            let mut buf = [0u8; 4];
            let mut symbols: Vec<SymbolId> = word
                .chars()
                .map(|c| vocab.interner.intern(c.encode_utf8(&mut buf)))
                .collect();
            symbols.push(vocab.interner.intern(EOW));
            vocab.words.push(symbols);
            vocab.freqs.push(freq);
        }
        Ok(vocab)
    }

    /// Builds a vocabulary from already symbolized entries such as
    /// `("l o w </w>", 5)`.
    pub fn from_symbolized<'a, I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut vocab = Vocab::default();
        for (word, freq) in entries {
            let symbols = word
                .split_whitespace()
                .map(|s| vocab.interner.intern(s))
                .collect();
            vocab.words.push(symbols);
            vocab.freqs.push(freq);
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Space-joined symbols of each word, in insertion order.
    pub fn entries(&self) -> Vec<(String, u64)> {
        self.words
            .iter()
            .zip(&self.freqs)
            .map(|(w, &f)| (self.render(w, " "), f))
            .collect()
    }

    fn render(&self, word: &[SymbolId], sep: &str) -> String {
        word.iter()
            .map(|&s| &**self.interner.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub(crate) fn segmentation(&self) -> BTreeMap<String, SymbolSequence> {
        self.words
            .iter()
            .map(|w| {
                let symbols: Vec<String> = w
                    .iter()
                    .map(|&s| self.interner.name(s).to_string())
                    .collect();
                let seq = SymbolSequence::new_unchecked(symbols);
                (seq.word(), seq)
            })
            .collect()
    }

    pub(crate) fn pair_counts(&self) -> FxHashMap<Pair, u64> {
        let mut counts = FxHashMap::default();
        for (word, &freq) in self.words.iter().zip(&self.freqs) {
            for w in word.windows(2) {
                *counts.entry((w[0], w[1])).or_insert(0) += freq;
            }
        }
        counts
    }

    /// Replaces every left-to-right, non-overlapping occurrence of `pair` in
    /// every word. Returns the number of replacements.
    pub(crate) fn merge_ids(&mut self, pair: Pair, merged: SymbolId) -> usize {
        let mut replaced = 0;
        for word in &mut self.words {
            replaced += merge_in_word(word, pair, merged);
        }
        replaced
    }
}

/// In-place left-to-right non-overlapping replacement within one word.
pub(crate) fn merge_in_word(word: &mut Vec<SymbolId>, (a, b): Pair, merged: SymbolId) -> usize {
    let mut read = 0;
    let mut write = 0;
    let mut replaced = 0;
    while read < word.len() {
        if read + 1 < word.len() && word[read] == a && word[read + 1] == b {
            word[write] = merged;
            read += 2;
            replaced += 1;
        } else {
            word[write] = word[read];
            read += 1;
        }
        write += 1;
    }
    word.truncate(write);
    replaced
}

/// Weighted adjacent-pair counts keyed by symbol strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    counts: BTreeMap<(String, String), u64>,
}

impl PairCounts {
    pub fn get(&self, left: &str, right: &str) -> u64 {
        self.counts
            .get(&(left.to_string(), right.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((&str, &str), u64)> + '_ {
        self.counts
            .iter()
            .map(|((l, r), &c)| ((l.as_str(), r.as_str()), c))
    }

    /// Highest count, ties broken by the lexicographically smallest pair.
    pub fn best(&self) -> Option<((&str, &str), u64)> {
        self.iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
    }
}

/// Counts adjacent symbol pairs in every word, overlaps included, weighted by
/// word frequency.
pub fn count_pair_frequencies(vocab: &Vocab) -> PairCounts {
    let counts = vocab
        .pair_counts()
        .into_iter()
        .map(|((l, r), c)| {
            let names = &vocab.interner;
            ((names.name(l).to_string(), names.name(r).to_string()), c)
        })
        .collect();
    PairCounts { counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeStatus {
    Merged {
        occurrences: usize,
    },
    /// The pair does not occur in any word; the vocabulary is unchanged.
    Absent,
}

/// Replaces every occurrence of `(left, right)` with the joined symbol.
pub fn merge_pair(vocab: &mut Vocab, left: &str, right: &str) -> MergeStatus {
    let (Some(l), Some(r)) = (vocab.interner.get(left), vocab.interner.get(right)) else {
        return MergeStatus::Absent;
    };
    let present = vocab
        .words
        .iter()
        .any(|w| w.windows(2).any(|p| p[0] == l && p[1] == r));
    if !present {
        return MergeStatus::Absent;
    }
    let merged = vocab.interner.merged((l, r));
    let occurrences = vocab.merge_ids((l, r), merged);
    MergeStatus::Merged { occurrences }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn algorithm_vocab() -> Vocab {
        Vocab::from_symbolized([
            ("l o w </w>", 5),
            ("l o w e r </w>", 2),
            ("n e w e s t </w>", 6),
            ("w i d e s t </w>", 3),
        ])
    }

    #[test]
    fn pair_counts_on_reference_vocab() {
        let counts = count_pair_frequencies(&algorithm_vocab());
        for (l, r, c) in [
            ("e", "s", 9),
            ("s", "t", 9),
            ("t", "</w>", 9),
            ("w", "e", 8),
            ("l", "o", 7),
            ("o", "w", 7),
            ("n", "e", 6),
            ("e", "w", 6),
            ("w", "</w>", 5),
            ("d", "e", 3),
        ] {
            assert_eq!(counts.get(l, r), c, "({l},{r})");
        }
        assert_eq!(counts.best(), Some((("e", "s"), 9)));
    }

    #[test]
    fn pair_counts_include_overlaps() {
        let counts = count_pair_frequencies(&Vocab::from_symbolized([("a a a </w>", 1)]));
        assert_eq!(counts.get("a", "a"), 2);
        assert_eq!(counts.get("a", "</w>"), 1);
        assert_eq!(counts.len(), 2);
        let counts = count_pair_frequencies(&Vocab::from_symbolized([("l o w </w>", 1)]));
        assert_eq!(counts.len(), 3);
        assert!(counts.iter().all(|(_, c)| c == 1));
    }

    #[test]
    fn merging_pairs() {
        let mut v = Vocab::from_symbolized([("n e w e s t </w>", 1)]);
        assert_eq!(
            merge_pair(&mut v, "e", "s"),
            MergeStatus::Merged { occurrences: 1 }
        );
        assert_eq!(v.entries()[0].0, "n e w es t </w>");

        let mut v = Vocab::from_symbolized([("a a a </w>", 1)]);
        merge_pair(&mut v, "a", "a");
        assert_eq!(v.entries()[0].0, "aa a </w>");

        let mut v = Vocab::from_symbolized([("n e w e r </w>", 4)]);
        merge_pair(&mut v, "r", "</w>");
        assert_eq!(v.entries(), vec![("n e w e r</w>".to_string(), 4)]);

        let mut v = Vocab::from_symbolized([("a b </w>", 1)]);
        assert_eq!(merge_pair(&mut v, "b", "a"), MergeStatus::Absent);
        assert_eq!(merge_pair(&mut v, "x", "y"), MergeStatus::Absent);
        assert_eq!(v.entries()[0].0, "a b </w>");
    }

    #[test]
    fn config_validation() {
        assert!(LearnConfig::new(0).validate().is_err());
        assert!(LearnConfig::new(1)
            .with_min_frequency(0)
            .validate()
            .is_err());
        assert!(LearnConfig::new(1).validate().is_ok());
    }
}
