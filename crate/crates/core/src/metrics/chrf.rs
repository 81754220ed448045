//! Character n-gram F-score.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhitespacePolicy {
    /// Remove all whitespace before extracting n-grams.
    StripSpaces,
    /// Keep whitespace as ordinary characters.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfConfig {
    /// Recall weight; 3 gives chrF3.
    pub beta: f64,
    pub max_n: usize,
    pub whitespace: WhitespacePolicy,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        Self {
            beta: 3.0,
            max_n: 6,
            whitespace: WhitespacePolicy::StripSpaces,
        }
    }
}

impl ChrfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.max_n == 0 {
            return Err(Error::Config("max n-gram order must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-order clipped match counts, summed over sentence pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChrfStats {
    /// `(matches, hypothesis n-grams, reference n-grams)` for n = 1..=max_n.
    pub orders: Vec<(u64, u64, u64)>,
}

impl ChrfStats {
    pub fn new(max_n: usize) -> Self {
        Self {
            orders: vec![(0, 0, 0); max_n],
        }
    }

    pub fn add(&mut self, hyp: &str, reference: &str, cfg: &ChrfConfig) {
        let hyp = prepare(hyp, cfg.whitespace);
        let reference = prepare(reference, cfg.whitespace);
        for (idx, order) in self.orders.iter_mut().enumerate() {
            let n = idx + 1;
            let hyp_grams = ngrams(&hyp, n);
            let ref_grams = ngrams(&reference, n);
            let matches: usize = hyp_grams
                .iter()
                .map(|(g, &c)| c.min(ref_grams.get(g).copied().unwrap_or(0)))
                .sum();
            order.0 += matches as u64;
            order.1 += hyp.len().saturating_sub(n - 1) as u64;
            order.2 += reference.len().saturating_sub(n - 1) as u64;
        }
    }

    /// Orders absent on both sides are skipped; orders absent on one side
    /// count as zero precision and recall. Precision and recall are averaged
    /// uniformly over the included orders. Returns a score in [0, 100].
    pub fn score(&self, beta: f64) -> f64 {
        let mut precision = 0.0;
        let mut recall = 0.0;
        let mut included = 0usize;
        for &(matches, hyp, reference) in &self.orders {
            if hyp == 0 && reference == 0 {
                continue;
            }
            included += 1;
            if hyp > 0 && reference > 0 {
                precision += matches as f64 / hyp as f64;
                recall += matches as f64 / reference as f64;
            }
        }
        if included == 0 {
            return 0.0;
        }
        precision /= included as f64;
        recall /= included as f64;
        let b2 = beta * beta;
        let denom = b2 * precision + recall;
        if denom == 0.0 {
            0.0
        } else {
            // Rounding can push a perfect match just past 100.
            (100.0 * (1.0 + b2) * precision * recall / denom).min(100.0)
        }
    }
}

fn prepare(text: &str, policy: WhitespacePolicy) -> Vec<char> {
    match policy {
        WhitespacePolicy::StripSpaces => text.chars().filter(|c| !c.is_whitespace()).collect(),
        WhitespacePolicy::Keep => text.chars().collect(),
    }
}

fn ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// chrF of a single hypothesis/reference pair.
pub fn chrf(hyp: &str, reference: &str, cfg: &ChrfConfig) -> Result<f64> {
    cfg.validate()?;
    let mut stats = ChrfStats::new(cfg.max_n);
    stats.add(hyp, reference, cfg);
    Ok(stats.score(cfg.beta))
}

/// Corpus chrF: n-gram statistics are summed over line pairs before scoring.
pub fn chrf_corpus<H: AsRef<str>, R: AsRef<str>>(
    hyp: &[H],
    reference: &[R],
    cfg: &ChrfConfig,
) -> Result<f64> {
    cfg.validate()?;
    if hyp.len() != reference.len() {
        return Err(Error::LineCountMismatch {
            left: hyp.len(),
            right: reference.len(),
        });
    }
    let mut stats = ChrfStats::new(cfg.max_n);
    for (h, r) in hyp.iter().zip(reference) {
        stats.add(h.as_ref(), r.as_ref(), cfg);
    }
    Ok(stats.score(cfg.beta))
}
