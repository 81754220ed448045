//! Browser bindings for the demo page. Every export returns a JSON string;
//! failures come back as `{"error": "..."}`.

use serde::Serialize;
use subword::learn::learn_bpe_indexed_traced;
use subword::metrics::{chrf_corpus, corpus_unigram_scores, ChrfConfig};
use subword::translit::TransliterationTable;
use subword::{initial_symbolization, Encoder, LearnConfig, MergeTable, WordFrequencyTable};
use wasm_bindgen::prelude::*;

/// Words whose merge steps are traced.
const TRACED_WORDS: usize = 12;

#[derive(Serialize)]
struct Rule {
    left: String,
    right: String,
    count: u64,
}

#[derive(Serialize)]
struct Step {
    rank: usize,
    rule: String,
    symbols: Vec<String>,
}

#[derive(Serialize)]
struct WordTrace {
    word: String,
    start: Vec<String>,
    steps: Vec<Step>,
}

#[derive(Serialize)]
struct Segmentation {
    rules: Vec<Rule>,
    segmented: String,
    traces: Vec<WordTrace>,
}

#[derive(Serialize)]
struct Span {
    start: usize,
    text: String,
}

#[derive(Serialize)]
struct Transliterated {
    text: String,
    untranslatable: Vec<Span>,
}

#[derive(Serialize)]
struct Scores {
    chrf: f64,
    precision: f64,
    recall: f64,
    f1: f64,
}

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("plain structs serialize")
}

/// Replays the rules in rank order on one word, recording every change.
fn trace(table: &MergeTable, word: &str) -> Result<WordTrace, String> {
    let start = initial_symbolization(word)
        .map_err(|e| e.to_string())?
        .into_symbols();
    let mut symbols = start.clone();
    let mut steps = Vec::new();
    for rule in table.rules() {
        let mut next = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == rule.left && symbols[i + 1] == rule.right {
                next.push(rule.result());
                i += 2;
            } else {
                next.push(symbols[i].clone());
                i += 1;
            }
        }
        if next.len() < symbols.len() {
            symbols = next;
            steps.push(Step {
                rank: rule.rank,
                rule: format!("{} + {}", rule.left, rule.right),
                symbols: symbols.clone(),
            });
        }
    }
    Ok(WordTrace {
        word: word.to_string(),
        start,
        steps,
    })
}

fn segment_impl(
    training: &str,
    merges: usize,
    min_frequency: u64,
    text: &str,
) -> Result<Segmentation, String> {
    let table = WordFrequencyTable::from_lines(training.lines());
    if table.is_empty() {
        return Err("the training text has no words".into());
    }
    let cfg = LearnConfig::new(merges).with_min_frequency(min_frequency);
    let learned = learn_bpe_indexed_traced(&table, &cfg).map_err(|e| e.to_string())?;
    let rules = learned
        .merges
        .rules()
        .iter()
        .zip(&learned.selected_counts)
        .map(|(r, &count)| Rule {
            left: r.left.clone(),
            right: r.right.clone(),
            count,
        })
        .collect();
    let encoder = Encoder::new(learned.merges.clone());
    let segmented = subword::apply_to_corpus(text.lines(), &encoder, None)
        .map_err(|e| e.to_string())?
        .lines
        .join("\n");
    let mut seen = std::collections::HashSet::new();
    let traces = text
        .split_whitespace()
        .filter(|w| seen.insert(*w))
        .take(TRACED_WORDS)
        .map(|w| trace(&learned.merges, w))
        .collect::<Result<_, _>>()?;
    Ok(Segmentation {
        rules,
        segmented,
        traces,
    })
}

/// Learns `merges` rules on `training` and segments `text` with them.
#[wasm_bindgen]
pub fn learn_and_segment(training: &str, merges: usize, min_frequency: u32, text: &str) -> String {
    to_json(segment_impl(
        training,
        merges,
        u64::from(min_frequency),
        text,
    ))
}

/// ISO 9 transliteration; `direction` is "cyr2lat" or "lat2cyr".
#[wasm_bindgen]
pub fn transliterate(text: &str, direction: &str) -> String {
    let table = TransliterationTable::iso9();
    let result = match direction {
        "cyr2lat" => Ok(Transliterated {
            text: table.cyrillic_to_latin(text),
            untranslatable: Vec::new(),
        }),
        "lat2cyr" => {
            let t = table.latin_to_cyrillic(text);
            Ok(Transliterated {
                text: t.text,
                untranslatable: t
                    .untranslatable
                    .into_iter()
                    .map(|u| Span {
                        start: u.start,
                        text: u.text,
                    })
                    .collect(),
            })
        }
        other => Err(format!("unknown direction {other:?}")),
    };
    to_json(result)
}

/// Corpus chrF and clipped unigram scores, line by line.
#[wasm_bindgen]
pub fn score(hypothesis: &str, reference: &str, beta: f64, max_n: usize) -> String {
    let run = || {
        let hyp: Vec<&str> = hypothesis.lines().collect();
        let reference: Vec<&str> = reference.lines().collect();
        let cfg = ChrfConfig {
            beta,
            max_n,
            ..Default::default()
        };
        let chrf = chrf_corpus(&hyp, &reference, &cfg).map_err(|e| e.to_string())?;
        let u = corpus_unigram_scores(&hyp, &reference).map_err(|e| e.to_string())?;
        Ok(Scores {
            chrf,
            precision: u.precision,
            recall: u.recall,
            f1: u.f1,
        })
    };
    to_json(run())
}
