//! Joint bilingual encodings: one merge table learned on the union of source
//! and target vocabularies, optionally bridged through transliteration when
//! the target uses the Cyrillic alphabet.

use std::collections::HashSet;

use crate::apply::Encoder;
use crate::error::{Error, Result};
use crate::learn::{learn_bpe_indexed, LearnConfig};
use crate::model::{group_units, MergeRule, MergeTable, SymbolSequence, WordFrequencyTable};
use crate::translit::{Direction, TransliterationTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTables {
    pub source: MergeTable,
    pub target: MergeTable,
    /// Whether the target table went through the transliteration bridge.
    pub bridged: bool,
    /// Latin rules with no exact Cyrillic counterpart.
    pub dropped: Vec<MergeRule>,
}

/// Learns a joint encoding on the summed frequency tables.
///
/// With a bridge, the target vocabulary is transliterated to Latin before
/// learning. The source side gets the Latin table; the target side gets the
/// back-transliterated rules and the original Latin rules interleaved by
/// their shared rank.
pub fn learn_joint(
    source: &WordFrequencyTable,
    target: &WordFrequencyTable,
    cfg: &LearnConfig,
    bridge: Option<&TransliterationTable>,
) -> Result<JointTables> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyTable);
    }
    let Some(translit) = bridge else {
        let mut union = source.clone();
        union.merge_from(target);
        let table = learn_bpe_indexed(&union, cfg)?;
        return Ok(JointTables {
            source: table.clone(),
            target: table,
            bridged: false,
            dropped: Vec::new(),
        });
    };

    let mut union = source.clone();
    for (word, count) in target.iter() {
        union.add(&translit.cyrillic_to_latin(word), count)?;
    }
    let latin = learn_bpe_indexed(&union, cfg)?;
    let cyrillic = translit.transliterate_merge_table(&latin, Direction::LatinToCyrillic);
    let target = interleave(&latin, &cyrillic.table, &cyrillic.origin);
    Ok(JointTables {
        source: latin,
        target,
        bridged: true,
        dropped: cyrillic.dropped,
    })
}

/// Single priority space: at each original rank the Cyrillic rule comes
/// first, then the Latin one. Repeated pairs keep their first position.
fn interleave(latin: &MergeTable, cyrillic: &MergeTable, origin: &[usize]) -> MergeTable {
    let mut by_rank: Vec<Option<&MergeRule>> = vec![None; latin.len()];
    for (rule, &rank) in cyrillic.rules().iter().zip(origin) {
        by_rank[rank] = Some(rule);
    }
    let mut seen = HashSet::new();
    let mut out = MergeTable::new();
    for (cyr, lat) in by_rank.into_iter().zip(latin.rules()) {
        for rule in cyr.into_iter().chain(Some(lat)) {
            if seen.insert((rule.left.clone(), rule.right.clone())) {
                out.push(rule.left.clone(), rule.right.clone());
            }
        }
    }
    out
}

/// Segments a Cyrillic word by transliterating it, applying the Latin
/// encoder and mapping every symbol back.
pub fn segment_via_bridge(
    word: &str,
    latin: &Encoder,
    translit: &TransliterationTable,
) -> Result<SymbolSequence> {
    let seq = latin.apply_merges(&translit.cyrillic_to_latin(word))?;
    let symbols = seq
        .symbols()
        .iter()
        .map(|s| match s.strip_suffix(crate::model::EOW) {
            Some(stem) => format!(
                "{}{}",
                translit.latin_to_cyrillic(stem).text,
                crate::model::EOW
            ),
            None => translit.latin_to_cyrillic(s).text,
        })
        .collect();
    SymbolSequence::new(symbols)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub pairs: usize,
    pub consistent: usize,
    /// `consistent / pairs`, or 1.0 when no pairs were given.
    pub score: f64,
    /// `(line, source word, target word)` of every inconsistent pair.
    pub mismatches: Vec<(usize, usize, usize)>,
}

/// Internal split points of a segmented word, in scalars of its (Latin)
/// rendering.
fn split_points<F>(units: &[&str], render: F) -> Vec<usize>
where
    F: Fn(&str) -> usize,
{
    let mut points = Vec::with_capacity(units.len().saturating_sub(1));
    let mut offset = 0;
    for unit in &units[..units.len() - 1] {
        offset += render(unit);
        points.push(offset);
    }
    points
}

/// Fraction of aligned word pairs whose split points coincide once the target
/// word is transliterated. `alignments[i]` lists `(source word, target word)`
/// indices for line `i`.
pub fn segmentation_consistency_report<S: AsRef<str>, T: AsRef<str>>(
    source: &[S],
    target: &[T],
    alignments: &[Vec<(usize, usize)>],
    translit: &TransliterationTable,
) -> Result<ConsistencyReport> {
    if source.len() != target.len() {
        return Err(Error::LineCountMismatch {
            left: source.len(),
            right: target.len(),
        });
    }
    if alignments.len() != source.len() {
        return Err(Error::LineCountMismatch {
            left: source.len(),
            right: alignments.len(),
        });
    }
    let mut pairs = 0;
    let mut consistent = 0;
    let mut mismatches = Vec::new();
    for (idx, ((src, tgt), links)) in source.iter().zip(target).zip(alignments).enumerate() {
        let line_no = idx + 1;
        let src_words = group_units(src.as_ref(), line_no)?;
        let tgt_words = group_units(tgt.as_ref(), line_no)?;
        for &(s, t) in links {
            let (Some(su), Some(tu)) = (src_words.get(s), tgt_words.get(t)) else {
                return Err(Error::format(
                    line_no,
                    format!("alignment {s}-{t} out of range"),
                ));
            };
            pairs += 1;
            let src_points = split_points(su, |u| u.chars().count());
            let tgt_points = split_points(tu, |u| translit.cyrillic_to_latin(u).chars().count());
            if src_points == tgt_points {
                consistent += 1;
            } else {
                mismatches.push((line_no, s, t));
            }
        }
    }
    let score = if pairs == 0 {
        1.0
    } else {
        consistent as f64 / pairs as f64
    };
    Ok(ConsistencyReport {
        pairs,
        consistent,
        score,
        mismatches,
    })
}
