//! Character n-gram segmentation with an optional shortlist of frequent words
//! that stay whole.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{
    check_marker_free, check_word, serialize_line, SymbolSequence, WordFrequencyTable, EOW,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramConfig {
    n: usize,
    shortlist: HashSet<String>,
    /// Attach `</w>` to the final chunk (default) or emit it as its own symbol.
    pub attached_eow: bool,
}

impl NgramConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        Ok(Self {
            n,
            shortlist: HashSet::new(),
            attached_eow: true,
        })
    }

    /// Keeps the `k` most frequent words of `table` unsegmented. Ties at the
    /// cut-off are broken lexicographically.
    pub fn with_shortlist(mut self, table: &WordFrequencyTable, k: usize) -> Self {
        self.shortlist = table
            .ranked()
            .into_iter()
            .take(k)
            .map(|(w, _)| w.to_string())
            .collect();
        self
    }

    pub fn detached(mut self) -> Self {
        self.attached_eow = false;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shortlist(&self) -> &HashSet<String> {
        &self.shortlist
    }
}

/// Splits a word into consecutive chunks of `n` characters; the last chunk
/// holds the remaining 1..=n characters and carries the end-of-word marker.
pub fn segment_ngrams(word: &str, cfg: &NgramConfig) -> Result<SymbolSequence> {
    check_word(word)?;
    let mut symbols: Vec<String> = if cfg.shortlist.contains(word) {
        vec![word.to_string()]
    } else {
        let chars: Vec<char> = word.chars().collect();
        chars.chunks(cfg.n).map(|c| c.iter().collect()).collect()
    };
    if cfg.attached_eow {
        symbols.last_mut().expect("non-empty word").push_str(EOW);
    } else {
        symbols.push(EOW.to_string());
    }
    Ok(SymbolSequence::new_unchecked(symbols))
}

pub fn segment_line_ngrams(line: &str, line_no: usize, cfg: &NgramConfig) -> Result<String> {
    check_marker_free(line, line_no)?;
    let words = line
        .split_whitespace()
        .map(|w| segment_ngrams(w, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(serialize_line(&words))
}

pub fn segment_corpus_ngrams<I, S>(lines: I, cfg: &NgramConfig) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    lines
        .into_iter()
        .enumerate()
        .map(|(idx, line)| segment_line_ngrams(line.as_ref(), idx + 1, cfg))
        .collect()
}
