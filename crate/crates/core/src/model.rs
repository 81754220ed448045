//! Shared data model: word frequency tables, symbol sequences, merge tables and
//! the `@@ ` segmented-text format.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::io::lines;

/// End-of-word marker. Detached from the last character at initialization.
pub const EOW: &str = "</w>";

/// Suffix carried by every non-final written unit of a segmented word.
pub const CONTINUATION: &str = "@@";

const MERGE_FILE_VERSION: u32 = 1;

pub(crate) fn check_word(word: &str) -> Result<()> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if word.chars().any(char::is_whitespace) {
        return Err(Error::WhitespaceInWord(word.to_string()));
    }
    Ok(())
}

/// Distinct word to count mapping extracted from a tokenized corpus.
///
/// Iteration order is lexicographic, so everything derived from the table is
/// independent of the order in which lines were fed in.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordFrequencyTable {
    counts: BTreeMap<String, u64>,
}

impl WordFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences of `word`. Zero counts are ignored.
    pub fn add(&mut self, word: &str, count: u64) -> Result<()> {
        check_word(word)?;
        if count > 0 {
            *self.counts.entry(word.to_string()).or_insert(0) += count;
        }
        Ok(())
    }

    /// Counts every whitespace-separated token of one line.
    pub fn add_line(&mut self, line: &str) {
        for token in line.split_whitespace() {
            *self.counts.entry(token.to_string()).or_insert(0) += 1;
        }
    }

    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = Self::new();
        for line in lines {
            table.add_line(line.as_ref());
        }
        table
    }

    /// Builds the table from a tokenized text stream. Invalid UTF-8 is
    /// reported with its 1-based line number.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut table = Self::new();
        for line in lines(reader) {
            table.add_line(&line?);
        }
        Ok(table)
    }

    /// Reads the `word count` file format written by [`write_to`](Self::write_to).
    pub fn read_frequency_file<R: BufRead>(reader: R) -> Result<Self> {
        let mut table = Self::new();
        for (idx, line) in lines(reader).enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let (word, count) = line
                .rsplit_once(' ')
                .ok_or_else(|| Error::format(line_no, "expected \"word count\""))?;
            let count: u64 = count
                .parse()
                .map_err(|_| Error::format(line_no, format!("invalid count {count:?}")))?;
            if count == 0 {
                return Err(Error::format(line_no, "count must be positive"));
            }
            table
                .add(word, count)
                .map_err(|e| Error::format(line_no, e.to_string()))?;
        }
        Ok(table)
    }

    /// Commutative count-merge, used to reduce per-chunk tables.
    pub fn merge_from(&mut self, other: &WordFrequencyTable) {
        for (word, &count) in &other.counts {
            *self.counts.entry(word.clone()).or_insert(0) += count;
        }
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Words in descending count order, ties broken lexicographically.
    /// Position `i` in the result has frequency rank `i + 1`.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<_> = self.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    /// Writes one `word count` line per entry in [`ranked`](Self::ranked) order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (word, count) in self.ranked() {
            writeln!(out, "{word} {count}")?;
        }
        Ok(())
    }
}

/// A word as an ordered list of subword symbols. The last symbol ends with
/// [`EOW`]; in the detached form it is exactly `</w>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolSequence {
    symbols: Vec<String>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        let valid = match symbols.split_last() {
            Some((last, rest)) => {
                last.ends_with(EOW) && (last.len() > EOW.len() || !rest.is_empty())
            }
            None => false,
        };
        if !valid {
            return Err(Error::Config(format!(
                "symbol sequence {symbols:?} must end with a non-empty word and {EOW}"
            )));
        }
        Ok(Self { symbols })
    }

    pub(crate) fn new_unchecked(symbols: Vec<String>) -> Self {
        debug_assert!(symbols.last().is_some_and(|s| s.ends_with(EOW)));
        Self { symbols }
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<String> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The word this sequence spells, without the end-of-word marker.
    pub fn word(&self) -> String {
        let mut word: String = self.symbols.concat();
        word.truncate(word.len() - EOW.len());
        word
    }

    /// Written units, see [`serialize_segmentation`].
    pub fn units(&self) -> Vec<String> {
        serialize_segmentation(self)
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbols.join(" "))
    }
}

/// Splits a word into one symbol per Unicode scalar value followed by a
/// detached end-of-word symbol.
pub fn initial_symbolization(word: &str) -> Result<SymbolSequence> {
    check_word(word)?;
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    symbols.push(EOW.to_string());
    Ok(SymbolSequence { symbols })
}

/// Turns a symbol sequence into written units: `@@` on every non-final unit,
/// marker stripped from the final one. A bare trailing `</w>` folds into the
/// unit before it.
pub fn serialize_segmentation(seq: &SymbolSequence) -> Vec<String> {
    let symbols = seq.symbols();
    let (last, body) = symbols.split_last().expect("non-empty symbol sequence");
    let (body, final_unit) = if last == EOW {
        let (prev, body) = body
            .split_last()
            .expect("word precedes bare end-of-word symbol");
        (body, prev.as_str())
    } else {
        (body, &last[..last.len() - EOW.len()])
    };
    let mut units: Vec<String> = body.iter().map(|s| format!("{s}{CONTINUATION}")).collect();
    units.push(final_unit.to_string());
    units
}

/// Serializes a line of segmented words, units separated by single spaces.
pub fn serialize_line<'a, I>(words: I) -> String
where
    I: IntoIterator<Item = &'a SymbolSequence>,
{
    let mut out = String::new();
    for seq in words {
        for unit in serialize_segmentation(seq) {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&unit);
        }
    }
    out
}

/// Groups the written units of one line into words.
pub fn group_units(line: &str, line_no: usize) -> Result<Vec<Vec<&str>>> {
    let mut words = Vec::new();
    let mut current = Vec::new();
    for unit in line.split_whitespace() {
        match unit.strip_suffix(CONTINUATION) {
            Some(stem) => current.push(stem),
            None => {
                current.push(unit);
                words.push(std::mem::take(&mut current));
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::OpenWord { line: line_no });
    }
    Ok(words)
}

/// Joins `u1@@ u2@@ ... uk` runs back into tokens.
pub fn revert_line(line: &str, line_no: usize) -> Result<String> {
    let words = group_units(line, line_no)?;
    Ok(words
        .into_iter()
        .map(|units| units.concat())
        .collect::<Vec<_>>()
        .join(" "))
}

pub fn revert_segmentation<I, S>(lines: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    lines
        .into_iter()
        .enumerate()
        .map(|(idx, line)| revert_line(line.as_ref(), idx + 1))
        .collect()
}

/// Rejects tokens that would make the segmented format ambiguous.
pub fn check_marker_free(line: &str, line_no: usize) -> Result<()> {
    match line.split_whitespace().find(|t| t.contains(CONTINUATION)) {
        Some(token) => Err(Error::ContinuationMarker {
            line: line_no,
            token: token.to_string(),
        }),
        None => Ok(()),
    }
}

/// One learned merge: `left right -> left+right`. The rank is the learning
/// iteration and doubles as application priority.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub rank: usize,
}

impl MergeRule {
    pub fn result(&self) -> String {
        format!("{}{}", self.left, self.right)
    }
}

/// Ordered list of merge rules. Rule `i` has rank `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergeTable {
    rules: Vec<MergeRule>,
}

impl MergeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, L, R>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (L, R)>,
        L: Into<String>,
        R: Into<String>,
    {
        let mut table = Self::new();
        for (left, right) in pairs {
            table.push(left.into(), right.into());
        }
        table
    }

    pub fn push(&mut self, left: String, right: String) {
        let rank = self.rules.len();
        self.rules.push(MergeRule { left, right, rank });
    }

    pub fn rules(&self) -> &[MergeRule] {
        &self.rules
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.rules
            .iter()
            .map(|r| (r.left.as_str(), r.right.as_str()))
    }

    /// Number of executed merges.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn eow(&self) -> &str {
        EOW
    }

    /// Writes the merge file: a `#bpe v1 merges=<n> eow=</w>` header, then one
    /// `left right` line per rule in rank order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "#bpe v{MERGE_FILE_VERSION} merges={} eow={EOW}",
            self.rules.len()
        )?;
        for rule in &self.rules {
            writeln!(out, "{} {}", rule.left, rule.right)?;
        }
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("merge table is valid UTF-8")
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut it = lines(reader);
        let header = it
            .next()
            .ok_or_else(|| Error::format(1, "missing merge file header"))??;
        let declared = parse_header(&header)?;
        let mut table = Self::new();
        for (idx, line) in it.enumerate() {
            let line = line?;
            let line_no = idx + 2;
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    table.push(l.to_string(), r.to_string())
                }
                _ => {
                    return Err(Error::format(
                        line_no,
                        format!("expected \"left right\", found {line:?}"),
                    ))
                }
            }
        }
        if table.len() != declared {
            return Err(Error::format(
                1,
                format!(
                    "header declares {declared} merges, file has {}",
                    table.len()
                ),
            ));
        }
        Ok(table)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_header(header: &str) -> Result<usize> {
    let bad = || Error::format(1, format!("malformed merge file header {header:?}"));
    let mut parts = header.split(' ');
    if parts.next() != Some("#bpe") || parts.next() != Some("v1") {
        return Err(bad());
    }
    let merges = parts
        .next()
        .and_then(|p| p.strip_prefix("merges="))
        .and_then(|n| n.parse().ok())
        .ok_or_else(bad)?;
    match (parts.next(), parts.next()) {
        (Some(eow), None) if eow.strip_prefix("eow=") == Some(EOW) => Ok(merges),
        _ => Err(bad()),
    }
}
