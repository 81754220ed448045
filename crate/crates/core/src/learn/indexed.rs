use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{merge_in_word, LearnConfig, Learned, Pair, StopReason, Vocab};
use crate::error::Result;
use crate::model::{MergeTable, WordFrequencyTable};

/// Heap entry. Ordered by count, then by the reversed symbol strings so the
/// lexicographically smallest pair wins ties.
struct Candidate {
    count: u64,
    left: Rc<str>,
    right: Rc<str>,
    pair: Pair,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| (&other.left, &other.right).cmp(&(&self.left, &self.right)))
    }
}

struct Index {
    vocab: Vocab,
    counts: FxHashMap<Pair, u64>,
    /// Words that contained the pair at some point. A superset; stale members
    /// are skipped when the pair is merged.
    containing: FxHashMap<Pair, FxHashSet<u32>>,
    heap: BinaryHeap<Candidate>,
}

impl Index {
    fn new(vocab: Vocab) -> Self {
        let mut containing: FxHashMap<Pair, FxHashSet<u32>> = FxHashMap::default();
        for (idx, word) in vocab.words.iter().enumerate() {
            for w in word.windows(2) {
                containing
                    .entry((w[0], w[1]))
                    .or_default()
                    .insert(idx as u32);
            }
        }
        let counts = vocab.pair_counts();
        let mut index = Index {
            vocab,
            counts,
            containing,
            heap: BinaryHeap::new(),
        };
        let pairs: Vec<Pair> = index.counts.keys().copied().collect();
        for pair in pairs {
            index.push(pair);
        }
        index
    }

    fn push(&mut self, pair: Pair) {
        let count = self.counts.get(&pair).copied().unwrap_or(0);
        if count == 0 {
            return;
        }
        let names = &self.vocab.interner;
        self.heap.push(Candidate {
            count,
            left: names.name(pair.0).clone(),
            right: names.name(pair.1).clone(),
            pair,
        });
    }

    /// Pops until the top entry matches the live count of its pair.
    fn best(&mut self) -> Option<(Pair, u64)> {
        while let Some(top) = self.heap.pop() {
            if self.counts.get(&top.pair) == Some(&top.count) {
                return Some((top.pair, top.count));
            }
        }
        None
    }

    fn merge(&mut self, pair: Pair) {
        let merged = self.vocab.interner.merged(pair);
        let Some(words) = self.containing.remove(&pair) else {
            return;
        };
        let mut words: Vec<u32> = words.into_iter().collect();
        words.sort_unstable();

        let mut delta: FxHashMap<Pair, i64> = FxHashMap::default();
        let mut old = Vec::new();
        for idx in words {
            let word = &mut self.vocab.words[idx as usize];
            if !word.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            let freq = self.vocab.freqs[idx as usize] as i64;
            old.clear();
            old.extend_from_slice(word);
            merge_in_word(word, pair, merged);

            // Pairs away from the replaced positions cancel out in `delta`;
            // only the changed neighbourhoods end up touching the counts.
            for w in old.windows(2) {
                *delta.entry((w[0], w[1])).or_insert(0) -= freq;
            }
            for w in word.windows(2) {
                let p = (w[0], w[1]);
                *delta.entry(p).or_insert(0) += freq;
                if w.contains(&merged) {
                    self.containing.entry(p).or_default().insert(idx);
                }
            }
        }

        let mut changed: Vec<Pair> = delta
            .into_iter()
            .filter(|&(_, d)| d != 0)
            .map(|(p, d)| {
                let count = self.counts.entry(p).or_insert(0);
                *count = (*count as i64 + d) as u64;
                if *count == 0 {
                    self.counts.remove(&p);
                }
                p
            })
            .collect();
        changed.sort_unstable();
        for p in changed {
            self.push(p);
        }
    }
}

/// Indexed learner. Produces the same merge table as
/// [`learn_bpe`](super::learn_bpe) without rescanning the vocabulary after
/// initialization.
pub fn learn_bpe_indexed(table: &WordFrequencyTable, cfg: &LearnConfig) -> Result<MergeTable> {
    learn_bpe_indexed_traced(table, cfg).map(|l| l.merges)
}

pub fn learn_bpe_indexed_traced(table: &WordFrequencyTable, cfg: &LearnConfig) -> Result<Learned> {
    cfg.validate()?;
    let mut index = Index::new(Vocab::from_table(table)?);
    let mut merges = MergeTable::new();
    let mut selected_counts = Vec::new();
    let mut stop = StopReason::Completed;

    for _ in 0..cfg.num_merges {
        let Some((pair, count)) = index.best() else {
            stop = StopReason::NoPairs;
            break;
        };
        if count < cfg.min_frequency {
            stop = StopReason::BelowMinFrequency;
            break;
        }
        index.merge(pair);
        let names = &index.vocab.interner;
        merges.push(
            names.name(pair.0).to_string(),
            names.name(pair.1).to_string(),
        );
        selected_counts.push(count);
    }

    Ok(Learned {
        merges,
        selected_counts,
        stop,
        segmentation: index.vocab.segmentation(),
    })
}
