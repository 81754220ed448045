//! Evaluation of (reverted) translation output: clipped unigram precision,
//! recall and F1, the same restricted to rare and unseen words or binned by
//! training frequency, chrF, and token/type/UNK corpus statistics.

mod chrf;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

pub use chrf::{chrf, chrf_corpus, ChrfConfig, ChrfStats, WhitespacePolicy};

use crate::error::{Error, Result};
use crate::model::WordFrequencyTable;

/// Rank cut-off separating frequent from rare words.
pub const DEFAULT_RARE_RANK: usize = 50_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClippedCounts {
    pub matches: u64,
    pub hyp_total: u64,
    pub ref_total: u64,
}

impl ClippedCounts {
    /// Clips per word against the reference and accumulates. Only tokens
    /// accepted by `keep` are counted.
    pub fn add<F>(&mut self, hyp: &[&str], reference: &[&str], keep: F)
    where
        F: Fn(&str) -> bool,
    {
        let mut ref_counts: HashMap<&str, u64> = HashMap::new();
        for &w in reference.iter().filter(|w| keep(w)) {
            *ref_counts.entry(w).or_insert(0) += 1;
            self.ref_total += 1;
        }
        let mut hyp_counts: HashMap<&str, u64> = HashMap::new();
        for &w in hyp.iter().filter(|w| keep(w)) {
            *hyp_counts.entry(w).or_insert(0) += 1;
            self.hyp_total += 1;
        }
        self.matches += hyp_counts
            .iter()
            .map(|(w, &c)| c.min(ref_counts.get(w).copied().unwrap_or(0)))
            .sum::<u64>();
    }

    pub fn scores(&self) -> UnigramScores {
        let ratio = |num: u64, den: u64, other: u64| {
            if den == 0 {
                if other == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.matches, self.hyp_total, self.ref_total);
        let recall = ratio(self.matches, self.ref_total, self.hyp_total);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        UnigramScores {
            precision,
            recall,
            f1,
            counts: *self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnigramScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: ClippedCounts,
}

/// Clipped unigram precision, recall and F1 of one token sequence pair.
/// Two empty sequences score 1; an empty side against a non-empty one scores 0.
pub fn clipped_unigram_scores(hyp: &[&str], reference: &[&str]) -> UnigramScores {
    let mut counts = ClippedCounts::default();
    counts.add(hyp, reference, |_| true);
    counts.scores()
}

fn check_lines<H, R>(hyp: &[H], reference: &[R]) -> Result<()> {
    if hyp.len() != reference.len() {
        return Err(Error::LineCountMismatch {
            left: hyp.len(),
            right: reference.len(),
        });
    }
    Ok(())
}

/// Corpus-level scores: clipping per line pair, counts summed.
pub fn corpus_unigram_scores<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    reference: &[R],
) -> Result<UnigramScores> {
    check_lines(hyp, reference)?;
    let mut counts = ClippedCounts::default();
    for (h, r) in hyp.iter().zip(reference) {
        let h: Vec<&str> = h.as_ref().split_whitespace().collect();
        let r: Vec<&str> = r.as_ref().split_whitespace().collect();
        counts.add(&h, &r, |_| true);
    }
    Ok(counts.scores())
}

/// Training-set frequency and rank of every word. Rank is 1-based position in
/// descending count order, ties broken lexicographically.
#[derive(Debug, Clone)]
pub struct FrequencyRanks {
    ranks: HashMap<String, (usize, u64)>,
}

impl FrequencyRanks {
    pub fn new(table: &WordFrequencyTable) -> Self {
        let ranks = table
            .ranked()
            .into_iter()
            .enumerate()
            .map(|(i, (w, c))| (w.to_string(), (i + 1, c)))
            .collect();
        Self { ranks }
    }

    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(word).map(|&(r, _)| r)
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.ranks.get(word).map_or(0, |&(_, c)| c)
    }

    pub fn types(&self) -> usize {
        self.ranks.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryScores {
    pub all: UnigramScores,
    /// Words outside the top `rare_rank` training words, unseen ones included.
    pub rare: UnigramScores,
    /// Words absent from the training text.
    pub oov: UnigramScores,
}

pub fn per_category_f1<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    reference: &[R],
    training: &WordFrequencyTable,
    rare_rank: usize,
) -> Result<CategoryScores> {
    check_lines(hyp, reference)?;
    let ranks = FrequencyRanks::new(training);
    let is_rare = |w: &str| ranks.rank(w).is_none_or(|r| r > rare_rank);
    let is_oov = |w: &str| ranks.rank(w).is_none();
    let mut all = ClippedCounts::default();
    let mut rare = ClippedCounts::default();
    let mut oov = ClippedCounts::default();
    for (h, r) in hyp.iter().zip(reference) {
        let h: Vec<&str> = h.as_ref().split_whitespace().collect();
        let r: Vec<&str> = r.as_ref().split_whitespace().collect();
        all.add(&h, &r, |_| true);
        rare.add(&h, &r, is_rare);
        oov.add(&h, &r, is_oov);
    }
    Ok(CategoryScores {
        all: all.scores(),
        rare: rare.scores(),
        oov: oov.scores(),
    })
}

/// Reference word types sharing one training frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    /// Training frequency; 0 for the unseen-word bin.
    pub frequency: u64,
    /// Lowest and highest training rank among the bin's reference types.
    /// Unseen words get rank `training types + 1`.
    pub rank_lo: usize,
    pub rank_hi: usize,
    pub n_types: usize,
    pub counts: ClippedCounts,
    /// Token-level clipped F1.
    pub f1: f64,
    /// Type-level F1: a type counts as correct when it has at least one
    /// clipped match anywhere in the corpus.
    pub f1_types: f64,
}

/// Groups reference word types by training frequency (highest first, unseen
/// words last) and scores each group.
pub fn f1_by_frequency_rank<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    reference: &[R],
    training: &WordFrequencyTable,
) -> Result<Vec<BinRow>> {
    check_lines(hyp, reference)?;
    let ranks = FrequencyRanks::new(training);
    let oov_rank = ranks.types() + 1;

    let hyp_lines: Vec<Vec<&str>> = hyp
        .iter()
        .map(|l| l.as_ref().split_whitespace().collect())
        .collect();
    let ref_lines: Vec<Vec<&str>> = reference
        .iter()
        .map(|l| l.as_ref().split_whitespace().collect())
        .collect();

    let mut bins: BTreeMap<std::cmp::Reverse<u64>, HashSet<&str>> = BTreeMap::new();
    for &w in ref_lines.iter().flatten() {
        bins.entry(std::cmp::Reverse(ranks.frequency(w)))
            .or_default()
            .insert(w);
    }

    let mut type_matches: HashMap<&str, u64> = HashMap::new();
    for (h, r) in hyp_lines.iter().zip(&ref_lines) {
        let mut ref_counts: HashMap<&str, u64> = HashMap::new();
        for &w in r {
            *ref_counts.entry(w).or_insert(0) += 1;
        }
        let mut hyp_counts: HashMap<&str, u64> = HashMap::new();
        for &w in h {
            *hyp_counts.entry(w).or_insert(0) += 1;
        }
        for (w, c) in hyp_counts {
            let m = c.min(ref_counts.get(w).copied().unwrap_or(0));
            if m > 0 {
                *type_matches.entry(w).or_insert(0) += m;
            }
        }
    }
    let hyp_types: HashSet<&str> = hyp_lines.iter().flatten().copied().collect();

    let mut rows = Vec::with_capacity(bins.len());
    for (std::cmp::Reverse(frequency), types) in bins {
        let mut counts = ClippedCounts::default();
        let in_bin = |w: &str| ranks.frequency(w) == frequency;
        for (h, r) in hyp_lines.iter().zip(&ref_lines) {
            counts.add(h, r, in_bin);
        }
        let type_ranks = types.iter().map(|w| ranks.rank(w).unwrap_or(oov_rank));
        let rank_lo = type_ranks.clone().min().unwrap_or(oov_rank);
        let rank_hi = type_ranks.max().unwrap_or(oov_rank);

        let hit = |w: &&&str| type_matches.contains_key(**w);
        let bin_hyp_types: Vec<&str> = hyp_types.iter().copied().filter(|w| in_bin(w)).collect();
        let type_counts = ClippedCounts {
            matches: types.iter().filter(hit).count() as u64,
            hyp_total: bin_hyp_types.len() as u64,
            ref_total: types.len() as u64,
        };
        rows.push(BinRow {
            frequency,
            rank_lo,
            rank_hi,
            n_types: types.len(),
            counts,
            f1: counts.scores().f1,
            f1_types: type_counts.scores().f1,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusStatistics {
    pub tokens: u64,
    pub types: usize,
    /// Test tokens that never occur in the training corpus.
    pub unknown: u64,
}

/// Token and type counts of a (segmented) training corpus, and the number of
/// test tokens missing from its types. Tokens are whitespace-separated units,
/// continuation markers included.
pub fn corpus_statistics<A, B>(train: &[A], test: &[B]) -> CorpusStatistics
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    let mut types: HashSet<&str> = HashSet::new();
    let mut tokens = 0;
    for line in train {
        for unit in line.as_ref().split_whitespace() {
            tokens += 1;
            types.insert(unit);
        }
    }
    let unknown = test
        .iter()
        .flat_map(|l| l.as_ref().split_whitespace())
        .filter(|u| !types.contains(u))
        .count() as u64;
    CorpusStatistics {
        tokens,
        types: types.len(),
        unknown,
    }
}

/// Everything `eval` can report. Absent sections are omitted from output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub chrf: Option<(f64, ChrfConfig)>,
    pub unigram: Option<UnigramScores>,
    pub categories: Option<CategoryScores>,
    pub bins: Vec<BinRow>,
}

impl EvalReport {
    /// Tab-separated `name<TAB>value` rows, then the bin table if present.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if let Some((score, cfg)) = &self.chrf {
            let _ = writeln!(out, "chrF{}\t{score:.6}", format_beta(cfg.beta));
        }
        if let Some(u) = &self.unigram {
            write_scores(&mut out, "unigram", u);
        }
        if let Some(c) = &self.categories {
            write_scores(&mut out, "all", &c.all);
            write_scores(&mut out, "rare", &c.rare);
            write_scores(&mut out, "oov", &c.oov);
        }
        if !self.bins.is_empty() {
            out.push_str("rank_lo\trank_hi\tfreq\tn_types\tmatches\thyp_tokens\tref_tokens\tf1_tokens\tf1_types\n");
            for b in &self.bins {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
                    b.rank_lo,
                    b.rank_hi,
                    b.frequency,
                    b.n_types,
                    b.counts.matches,
                    b.counts.hyp_total,
                    b.counts.ref_total,
                    b.f1,
                    b.f1_types
                );
            }
        }
        out
    }
}

fn format_beta(beta: f64) -> String {
    if beta.fract() == 0.0 {
        format!("{}", beta as i64)
    } else {
        format!("{beta}")
    }
}

fn write_scores(out: &mut String, name: &str, s: &UnigramScores) {
    let _ = writeln!(out, "{name}_precision\t{:.6}", s.precision);
    let _ = writeln!(out, "{name}_recall\t{:.6}", s.recall);
    let _ = writeln!(out, "{name}_f1\t{:.6}", s.f1);
}

/// `rank<TAB>freq<TAB>f1<TAB>n` lines (lowest rank of each bin, token F1,
/// number of types) behind a `#` header.
pub fn plot_data(bins: &[BinRow]) -> String {
    let mut out = String::from("# rank\tfreq\tf1\tn\n");
    for b in bins {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{}",
            b.rank_lo, b.frequency, b.f1, b.n_types
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipped_fixture() {
        let s = clipped_unigram_scores(&["a", "b", "b", "d"], &["a", "b", "c"]);
        assert_eq!(s.precision, 0.5);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.f1 - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn clipped_edge_cases() {
        let s = clipped_unigram_scores(&["x", "y"], &["x", "y"]);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = clipped_unigram_scores(&["x"], &["y"]);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = clipped_unigram_scores(&[], &[]);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = clipped_unigram_scores(&[], &["y"]);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn corpus_clips_per_line() {
        // "a" twice in line 1 of the hypothesis only matches once there,
        // even though line 2 of the reference has a spare "a".
        let s = corpus_unigram_scores(&["a a", "b"], &["a", "a b"]).unwrap();
        assert_eq!(s.counts.matches, 2);
        assert_eq!(s.counts.hyp_total, 3);
        assert_eq!(s.counts.ref_total, 3);
        assert!(corpus_unigram_scores(&["a"], &["a", "b"]).is_err());
    }

    #[test]
    fn categories() {
        let training = WordFrequencyTable::from_lines(["the the the house house cat"]);
        let refs = ["the house Obama", "the cat Putin"];
        let c = per_category_f1(&refs, &refs, &training, 2).unwrap();
        assert_eq!((c.all.f1, c.rare.f1, c.oov.f1), (1.0, 1.0, 1.0));

        // OOV words all copied correctly, frequent words wrong.
        let hyp = ["house house Obama", "cat cat Putin"];
        let c = per_category_f1(&hyp, &refs, &training, 2).unwrap();
        assert_eq!(c.oov.f1, 1.0);
        assert_eq!(c.oov.counts.matches, 2);
        // cat has rank 3, so it is rare along with both names.
        assert_eq!(c.rare.counts.ref_total, 3);
        assert_eq!(c.rare.counts.hyp_total, 4);
        assert_eq!(c.rare.counts.matches, 3);
        assert!(c.all.f1 < 1.0);
    }

    #[test]
    fn bins_group_equal_frequencies() {
        let training =
            WordFrequencyTable::from_lines(["a a a a a a a a a a b b b b b b b b b b c d"]);
        let refs = ["a b c d e"];
        let rows = f1_by_frequency_rank(&refs, &refs, &training).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.frequency).collect::<Vec<_>>(),
            [10, 1, 0]
        );
        assert_eq!(rows.iter().map(|r| r.n_types).sum::<usize>(), 5);
        assert_eq!((rows[0].rank_lo, rows[0].rank_hi), (1, 2));
        assert_eq!((rows[1].rank_lo, rows[1].rank_hi), (3, 4));
        assert_eq!((rows[2].rank_lo, rows[2].rank_hi), (5, 5));
        assert!(rows.iter().all(|r| r.f1 == 1.0 && r.f1_types == 1.0));

        let single =
            f1_by_frequency_rank(&["a"], &["a b"], &WordFrequencyTable::from_lines(["a b"]))
                .unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn bins_decrease_with_rarity() {
        let training = WordFrequencyTable::from_lines(["f f f f m m r"]);
        let refs = ["f m r x", "f m r y", "f m x z"];
        let hyps = ["f m r q", "f m q q", "f q q q"];
        let rows = f1_by_frequency_rank(&hyps, &refs, &training).unwrap();
        let f1s: Vec<f64> = rows.iter().map(|r| r.f1).collect();
        assert_eq!(rows.last().unwrap().frequency, 0);
        assert!(f1s.windows(2).all(|w| w[0] > w[1]), "{f1s:?}");
    }

    #[test]
    fn bins_sum_to_corpus_counts() {
        let training = WordFrequencyTable::from_lines(["a a b c c c d"]);
        let refs = ["a b c", "d e a", "c c x"];
        let hyps = ["a c c", "d a e e", "x y"];
        let rows = f1_by_frequency_rank(&hyps, &refs, &training).unwrap();
        let corpus = corpus_unigram_scores(&hyps, &refs).unwrap();
        let matches: u64 = rows.iter().map(|r| r.counts.matches).sum();
        let ref_total: u64 = rows.iter().map(|r| r.counts.ref_total).sum();
        assert_eq!(matches, corpus.counts.matches);
        assert_eq!(ref_total, corpus.counts.ref_total);
    }

    #[test]
    fn statistics() {
        let s = corpus_statistics(&["a b"], &["a c"]);
        assert_eq!(
            s,
            CorpusStatistics {
                tokens: 2,
                types: 2,
                unknown: 1
            }
        );
        let s = corpus_statistics(&["lo@@ w lo@@ w"], &["lo@@ w"]);
        assert_eq!(
            s,
            CorpusStatistics {
                tokens: 4,
                types: 2,
                unknown: 0
            }
        );
    }

    #[test]
    fn report_output() {
        let report = EvalReport {
            chrf: Some((100.0, ChrfConfig::default())),
            unigram: Some(clipped_unigram_scores(&["a"], &["a"])),
            ..Default::default()
        };
        assert_eq!(
            report.to_tsv(),
            "chrF3\t100.000000\nunigram_precision\t1.000000\nunigram_recall\t1.000000\nunigram_f1\t1.000000\n"
        );
        let bins = f1_by_frequency_rank(
            &["a b"],
            &["a b"],
            &WordFrequencyTable::from_lines(["a a b"]),
        )
        .unwrap();
        assert_eq!(
            plot_data(&bins),
            "# rank\tfreq\tf1\tn\n1\t2\t1.000000\t1\n2\t1\t1.000000\t1\n"
        );
    }
}
