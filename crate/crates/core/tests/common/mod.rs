//! Reference implementations used as oracles by the integration tests.
//! Nothing here calls into the library's learner or scorers.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use subword::WordFrequencyTable;

/// `low lowest newer wider`, each seen once.
pub fn small_dictionary() -> WordFrequencyTable {
    WordFrequencyTable::from_lines(["low lowest newer wider"])
}

/// Four words with distinct counts and an unambiguous first merge.
pub fn weighted_table() -> WordFrequencyTable {
    let mut t = WordFrequencyTable::new();
    for (w, c) in [("low", 5), ("lower", 2), ("newest", 6), ("widest", 3)] {
        t.add(w, c).unwrap();
    }
    t
}

pub struct OracleRun {
    pub merges: Vec<(String, String)>,
    pub counts: Vec<u64>,
    /// Word -> final space-separated symbol string.
    pub vocab: BTreeMap<String, String>,
}

/// Textbook learner: words are space-joined symbol strings, pair counts are
/// rebuilt from scratch every iteration, and merges rewrite the strings.
pub fn oracle_learn(
    table: &WordFrequencyTable,
    num_merges: usize,
    min_frequency: u64,
) -> OracleRun {
    let mut vocab: BTreeMap<String, (String, u64)> = table
        .iter()
        .map(|(w, c)| {
            let mut s: Vec<String> = w.chars().map(|c| c.to_string()).collect();
            s.push("</w>".to_string());
            (w.to_string(), (s.join(" "), c))
        })
        .collect();
    let mut merges = Vec::new();
    let mut counts = Vec::new();
    for _ in 0..num_merges {
        let mut stats: HashMap<(String, String), u64> = HashMap::new();
        for (symbols, freq) in vocab.values() {
            let parts: Vec<&str> = symbols.split(' ').collect();
            for w in parts.windows(2) {
                *stats
                    .entry((w[0].to_string(), w[1].to_string()))
                    .or_default() += freq;
            }
        }
        let mut best: Option<(&(String, String), u64)> = None;
        for (pair, &c) in &stats {
            best = match best {
                Some((bp, bc)) if bc > c || (bc == c && bp < pair) => Some((bp, bc)),
                _ => Some((pair, c)),
            };
        }
        let Some((pair, count)) = best else { break };
        if count < min_frequency {
            break;
        }
        let pair = pair.clone();
        for (symbols, _) in vocab.values_mut() {
            *symbols = oracle_merge(symbols, &pair.0, &pair.1);
        }
        merges.push(pair);
        counts.push(count);
    }
    OracleRun {
        merges,
        counts,
        vocab: vocab.into_iter().map(|(w, (s, _))| (w, s)).collect(),
    }
}

/// Replaces every whole-symbol occurrence of `left right`, scanning left to
/// right without overlap.
pub fn oracle_merge(symbols: &str, left: &str, right: &str) -> String {
    let parts: Vec<&str> = symbols.split(' ').collect();
    let mut out: Vec<String> = Vec::with_capacity(parts.len());
    let mut i = 0;
    while i < parts.len() {
        if i + 1 < parts.len() && parts[i] == left && parts[i + 1] == right {
            out.push(format!("{left}{right}"));
            i += 2;
        } else {
            out.push(parts[i].to_string());
            i += 1;
        }
    }
    out.join(" ")
}

/// Merge file the way the tool writes it, built from the oracle's rules.
pub fn oracle_merge_file(merges: &[(String, String)]) -> String {
    let mut out = format!("#bpe v1 merges={} eow=</w>\n", merges.len());
    for (l, r) in merges {
        out.push_str(&format!("{l} {r}\n"));
    }
    out
}

/// Random word table with a skewed small alphabet so pairs collide often.
pub fn random_table<R: Rng>(
    rng: &mut R,
    max_types: usize,
    max_len: usize,
    max_count: u64,
) -> WordFrequencyTable {
    const ALPHABETS: [&[char]; 3] = [
        &['a', 'b', 'c'],
        &['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'],
        &['a', 'e', 'n', 's', 't', 'é', 'ж', '語'],
    ];
    let alphabet = ALPHABETS.choose(rng).unwrap();
    let types = rng.gen_range(1..=max_types);
    let mut table = WordFrequencyTable::new();
    for _ in 0..types {
        let len = rng.gen_range(1..=max_len);
        let word: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        table.add(&word, rng.gen_range(1..=max_count)).unwrap();
    }
    table
}

/// Brute-force chrF: every n-gram is a slice, counts come from linear scans.
pub fn chrf_oracle(hyp: &str, reference: &str, beta: f64, max_n: usize) -> f64 {
    let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n {
        let hg: Vec<&[char]> = if h.len() >= n {
            (0..=h.len() - n).map(|i| &h[i..i + n]).collect()
        } else {
            vec![]
        };
        let rg: Vec<&[char]> = if r.len() >= n {
            (0..=r.len() - n).map(|i| &r[i..i + n]).collect()
        } else {
            vec![]
        };
        if hg.is_empty() && rg.is_empty() {
            continue;
        }
        orders += 1;
        if hg.is_empty() || rg.is_empty() {
            continue;
        }
        let mut pool = rg.clone();
        let mut matches = 0;
        for g in &hg {
            if let Some(pos) = pool.iter().position(|x| x == g) {
                pool.swap_remove(pos);
                matches += 1;
            }
        }
        p_sum += matches as f64 / hg.len() as f64;
        r_sum += matches as f64 / rg.len() as f64;
    }
    if orders == 0 {
        return 0.0;
    }
    let p = p_sum / orders as f64;
    let rc = r_sum / orders as f64;
    let b2 = beta * beta;
    if b2 * p + rc == 0.0 {
        0.0
    } else {
        100.0 * (1.0 + b2) * p * rc / (b2 * p + rc)
    }
}

/// Clipped unigram precision, recall and F1 by consuming reference tokens.
pub fn clipped_oracle(hyp: &[&str], reference: &[&str]) -> (f64, f64, f64) {
    let mut pool: Vec<&str> = reference.to_vec();
    let mut matches = 0usize;
    for h in hyp {
        if let Some(pos) = pool.iter().position(|r| r == h) {
            pool.remove(pos);
            matches += 1;
        }
    }
    let p = if hyp.is_empty() {
        0.0
    } else {
        matches as f64 / hyp.len() as f64
    };
    let r = if reference.is_empty() {
        0.0
    } else {
        matches as f64 / reference.len() as f64
    };
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

/// Large synthetic vocabulary: distinct words built from syllables, with
/// Zipf-like counts.
pub fn synthetic_vocabulary<R: Rng>(rng: &mut R, types: usize) -> WordFrequencyTable {
    const ONSETS: [&str; 16] = [
        "", "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "sch", "st",
    ];
    const NUCLEI: [&str; 8] = ["a", "e", "i", "o", "u", "ei", "au", "ie"];
    const CODAS: [&str; 6] = ["", "n", "r", "s", "t", "ng"];
    let mut table = WordFrequencyTable::new();
    let mut rank = 0usize;
    while table.len() < types {
        let syllables = rng.gen_range(1..=4);
        let mut word = String::new();
        for _ in 0..syllables {
            word.push_str(ONSETS.choose(rng).unwrap());
            word.push_str(NUCLEI.choose(rng).unwrap());
            word.push_str(CODAS.choose(rng).unwrap());
        }
        if table.get(&word) == 0 {
            rank += 1;
            table.add(&word, (200_000 / rank as u64).max(1)).unwrap();
        }
    }
    table
}
