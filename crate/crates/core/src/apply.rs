//! Test-time application of a merge table, optionally constrained to a
//! network vocabulary by reversing merges.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::io::lines;
use crate::learn::merge_in_word;
use crate::model::{
    check_marker_free, check_word, serialize_line, MergeRule, MergeTable, SymbolSequence, EOW,
};

type Id = u32;

/// A merge table compiled for lookup: pair ranks by symbol id, and for every
/// merged string the highest-rank rule that produces it.
#[derive(Debug, Clone)]
pub struct Encoder {
    table: MergeTable,
    ids: FxHashMap<String, Id>,
    names: Vec<String>,
    ranks: FxHashMap<(Id, Id), (usize, Id)>,
    producers: FxHashMap<String, usize>,
    eow: Id,
}

impl Encoder {
    pub fn new(table: MergeTable) -> Self {
        let mut enc = Encoder {
            table: MergeTable::new(),
            ids: FxHashMap::default(),
            names: Vec::new(),
            ranks: FxHashMap::default(),
            producers: FxHashMap::default(),
            eow: 0,
        };
        enc.eow = enc.intern(EOW);
        for rule in table.rules() {
            let l = enc.intern(&rule.left);
            let r = enc.intern(&rule.right);
            let result = rule.result();
            let m = enc.intern(&result);
            // First occurrence of a pair keeps its (lower) rank.
            enc.ranks.entry((l, r)).or_insert((rule.rank, m));
            enc.producers.insert(result, rule.rank);
        }
        enc.table = table;
        enc
    }

    fn intern(&mut self, name: &str) -> Id {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as Id;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn table(&self) -> &MergeTable {
        &self.table
    }

    /// Segments one word: split into characters plus `</w>`, then merge.
    pub fn apply_merges(&self, word: &str) -> Result<SymbolSequence> {
        check_word(word)?;
        let mut extra = Vec::new();
        let mut buf = [0u8; 4];
        let mut symbols: Vec<Id> = word
            .chars()
            .map(|c| self.lookup(c.encode_utf8(&mut buf), &mut extra))
            .collect();
        symbols.push(self.eow);
        self.merge_ids(&mut symbols);
        Ok(self.to_sequence(&symbols, &extra))
    }

    /// Runs the merge loop on an arbitrary starting segmentation.
    pub fn apply_to_symbols(&self, seq: &SymbolSequence) -> SymbolSequence {
        let mut extra = Vec::new();
        let mut symbols: Vec<Id> = seq
            .symbols()
            .iter()
            .map(|s| self.lookup(s, &mut extra))
            .collect();
        self.merge_ids(&mut symbols);
        self.to_sequence(&symbols, &extra)
    }

    fn lookup(&self, symbol: &str, extra: &mut Vec<String>) -> Id {
        match self.ids.get(symbol) {
            Some(&id) => id,
            None => {
                extra.push(symbol.to_string());
                (self.names.len() + extra.len() - 1) as Id
            }
        }
    }

    fn name<'a>(&'a self, id: Id, extra: &'a [String]) -> &'a str {
        let id = id as usize;
        match self.names.get(id) {
            Some(name) => name,
            None => &extra[id - self.names.len()],
        }
    }

    fn to_sequence(&self, symbols: &[Id], extra: &[String]) -> SymbolSequence {
        let symbols = symbols
            .iter()
            .map(|&s| self.name(s, extra).to_string())
            .collect();
        SymbolSequence::new_unchecked(symbols)
    }

    /// Repeatedly merges all occurrences of the lowest-ranked applicable pair
    /// whose rank exceeds the last one applied. This is exactly a replay of the
    /// rules in rank order, which is what the learner did to its own words.
    fn merge_ids(&self, symbols: &mut Vec<Id>) {
        let mut floor: Option<usize> = None;
        loop {
            let next = symbols
                .windows(2)
                .filter_map(|w| {
                    self.ranks
                        .get(&(w[0], w[1]))
                        .map(|&(rank, m)| (rank, (w[0], w[1]), m))
                })
                .filter(|&(rank, _, _)| floor.is_none_or(|f| rank > f))
                .min_by_key(|&(rank, _, _)| rank);
            let Some((rank, pair, merged)) = next else {
                break;
            };
            merge_in_word(symbols, pair, merged);
            floor = Some(rank);
        }
    }

    /// The rule with the highest rank among those producing `symbol`.
    pub fn producer(&self, symbol: &str) -> Option<&MergeRule> {
        self.producers
            .get(symbol)
            .map(|&rank| &self.table.rules()[rank])
    }

    /// Reverses merges until every piece of `symbol` is in `vocab`. Single
    /// characters (and the bare end-of-word marker) that are still unknown are
    /// returned with `known == false`.
    pub fn split_to_known(&self, symbol: &str, vocab: &SymbolVocabulary) -> Result<Vec<Piece>> {
        let mut out = Vec::new();
        self.split_into(symbol, vocab, &mut out)?;
        Ok(out)
    }

    fn split_into(
        &self,
        symbol: &str,
        vocab: &SymbolVocabulary,
        out: &mut Vec<Piece>,
    ) -> Result<()> {
        if vocab.contains(symbol) {
            out.push(Piece::known(symbol));
            return Ok(());
        }
        if let Some(rule) = self.producer(symbol) {
            self.split_into(&rule.left, vocab, out)?;
            return self.split_into(&rule.right, vocab, out);
        }
        if symbol == EOW || symbol.chars().nth(1).is_none() {
            out.push(Piece {
                symbol: symbol.to_string(),
                known: false,
            });
            return Ok(());
        }
        Err(Error::Underivable(symbol.to_string()))
    }

    /// Segments a word and, when a vocabulary is given, splits unknown symbols.
    pub fn segment_word(
        &self,
        word: &str,
        vocab: Option<&SymbolVocabulary>,
    ) -> Result<WordSegmentation> {
        let seq = self.apply_merges(word)?;
        let Some(vocab) = vocab else {
            return Ok(WordSegmentation {
                sequence: seq,
                unknown: Vec::new(),
            });
        };
        let mut pieces = Vec::with_capacity(seq.len());
        for symbol in seq.symbols() {
            self.split_into(symbol, vocab, &mut pieces)?;
        }
        let unknown = pieces
            .iter()
            .filter(|p| !p.known)
            .map(|p| p.symbol.clone())
            .collect();
        let symbols = pieces.into_iter().map(|p| p.symbol).collect();
        let sequence =
            SymbolSequence::new(symbols).map_err(|_| Error::Underivable(word.to_string()))?;
        Ok(WordSegmentation { sequence, unknown })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub symbol: String,
    pub known: bool,
}

impl Piece {
    fn known(symbol: &str) -> Self {
        Piece {
            symbol: symbol.to_string(),
            known: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSegmentation {
    pub sequence: SymbolSequence,
    /// Irreducible symbols missing from the vocabulary.
    pub unknown: Vec<String>,
}

/// Symbols retained for the network vocabulary, with training counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolVocabulary {
    counts: BTreeMap<String, u64>,
    threshold: u64,
}

impl SymbolVocabulary {
    pub fn from_counts<I, S>(counts: I, threshold: u64) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let counts = counts
            .into_iter()
            .map(|(s, c)| (s.into(), c))
            .filter(|&(_, c)| c >= threshold)
            .collect();
        SymbolVocabulary { counts, threshold }
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.counts.contains_key(symbol)
    }

    pub fn count(&self, symbol: &str) -> Option<u64> {
        self.counts.get(symbol).copied()
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(s, &c)| (s.as_str(), c))
    }

    /// Same vocabulary with a stricter threshold.
    pub fn filtered(&self, threshold: u64) -> Self {
        Self::from_counts(self.iter(), threshold)
    }

    /// `symbol count` lines, descending count, ties lexicographic.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        for (symbol, count) in rows {
            writeln!(out, "{symbol} {count}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R, threshold: u64) -> Result<Self> {
        let mut counts = Vec::new();
        for (idx, line) in lines(reader).enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let parsed = line
                .rsplit_once(' ')
                .filter(|(s, _)| !s.is_empty())
                .and_then(|(s, c)| c.parse::<u64>().ok().map(|c| (s.to_string(), c)));
            match parsed {
                Some(entry) => counts.push(entry),
                None => {
                    return Err(Error::format(
                        idx + 1,
                        format!("expected \"symbol count\", found {line:?}"),
                    ))
                }
            }
        }
        Ok(Self::from_counts(counts, threshold))
    }
}

/// Counts every symbol of an already segmented training corpus and keeps
/// those seen at least `threshold` times.
pub fn build_network_vocabulary<'a, I>(segmented: I, threshold: u64) -> SymbolVocabulary
where
    I: IntoIterator<Item = &'a SymbolSequence>,
{
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for seq in segmented {
        for symbol in seq.symbols() {
            *counts.entry(symbol).or_insert(0) += 1;
        }
    }
    SymbolVocabulary::from_counts(counts, threshold)
}

/// Residual unknown symbols with occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnknownReport {
    pub counts: BTreeMap<String, u64>,
}

impl UnknownReport {
    pub fn record(&mut self, symbols: &[String]) {
        for s in symbols {
            *self.counts.entry(s.clone()).or_insert(0) += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSegmentation {
    pub lines: Vec<String>,
    pub words: Vec<Vec<SymbolSequence>>,
    pub unknown: UnknownReport,
}

/// Segments every token of every line. Words are memoized.
pub fn apply_to_corpus<I, S>(
    lines: I,
    encoder: &Encoder,
    vocab: Option<&SymbolVocabulary>,
) -> Result<CorpusSegmentation>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut cache: FxHashMap<String, WordSegmentation> = FxHashMap::default();
    let mut out = CorpusSegmentation::default();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.as_ref();
        check_marker_free(line, idx + 1)?;
        let mut words = Vec::new();
        for token in line.split_whitespace() {
            if !cache.contains_key(token) {
                let seg = encoder.segment_word(token, vocab)?;
                cache.insert(token.to_string(), seg);
            }
            let seg = &cache[token];
            out.unknown.record(&seg.unknown);
            words.push(seg.sequence.clone());
        }
        out.lines.push(serialize_line(&words));
        out.words.push(words);
    }
    Ok(out)
}
