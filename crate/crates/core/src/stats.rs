//! Side-by-side token/type/UNK accounting for several segmentation schemes.

use std::fmt::Write as _;

use crate::apply::{apply_to_corpus, Encoder};
use crate::error::{Error, Result};
use crate::metrics::{corpus_statistics, CorpusStatistics};
use crate::ngram::{segment_corpus_ngrams, NgramConfig};

#[derive(Debug, Clone)]
pub enum Scheme {
    /// Whitespace tokens as they are.
    None,
    CharNgram(NgramConfig),
    Bpe(Encoder),
    /// Output of an external segmenter, already aligned with the raw corpora.
    Presegmented {
        train: Vec<String>,
        test: Vec<String>,
    },
}

impl Scheme {
    pub fn segment<S: AsRef<str>>(
        &self,
        lines: &[S],
        presegmented: &[String],
    ) -> Result<Vec<String>> {
        match self {
            Scheme::None => Ok(lines
                .iter()
                .map(|l| l.as_ref().split_whitespace().collect::<Vec<_>>().join(" "))
                .collect()),
            Scheme::CharNgram(cfg) => segment_corpus_ngrams(lines, cfg),
            Scheme::Bpe(encoder) => Ok(apply_to_corpus(lines, encoder, None)?.lines),
            Scheme::Presegmented { .. } => {
                if presegmented.len() != lines.len() {
                    return Err(Error::LineCountMismatch {
                        left: lines.len(),
                        right: presegmented.len(),
                    });
                }
                Ok(presegmented.to_vec())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedScheme {
    pub name: String,
    pub scheme: Scheme,
}

impl NamedScheme {
    pub fn new(name: impl Into<String>, scheme: Scheme) -> Self {
        Self {
            name: name.into(),
            scheme,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeRow {
    pub name: String,
    pub stats: CorpusStatistics,
}

/// One row per scheme, in the order given.
pub fn compare_schemes<A, B>(
    train: &[A],
    test: &[B],
    schemes: &[NamedScheme],
) -> Result<Vec<SchemeRow>>
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    schemes
        .iter()
        .map(|named| {
            let (pre_train, pre_test) = match &named.scheme {
                Scheme::Presegmented { train, test } => (train.as_slice(), test.as_slice()),
                _ => (&[][..], &[][..]),
            };
            let seg_train = named.scheme.segment(train, pre_train)?;
            let seg_test = named.scheme.segment(test, pre_test)?;
            Ok(SchemeRow {
                name: named.name.clone(),
                stats: corpus_statistics(&seg_train, &seg_test),
            })
        })
        .collect()
}

pub fn format_tsv(rows: &[SchemeRow]) -> String {
    let mut out = String::from("segmentation\ttokens\ttypes\tunk\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.name, r.stats.tokens, r.stats.types, r.stats.unknown
        );
    }
    out
}

/// Plain-text table with right-aligned numbers.
pub fn format_table(rows: &[SchemeRow]) -> String {
    let header = ["segmentation", "# tokens", "# types", "# UNK"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.name.clone(),
                r.stats.tokens.to_string(),
                r.stats.types.to_string(),
                r.stats.unknown.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: [&str; 4]| {
        let _ = write!(out, "{:<w$}", row[0], w = widths[0]);
        for (c, w) in row[1..].iter().zip(&widths[1..]) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
    };
    line(&mut out, header);
    let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in &cells {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
    }
    out
}
