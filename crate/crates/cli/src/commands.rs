use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use subword::apply::WordSegmentation;
use subword::joint::{learn_joint, segmentation_consistency_report};
use subword::learn::{learn_bpe_indexed_traced, learn_bpe_traced, StopReason};
use subword::metrics::{
    chrf_corpus, corpus_unigram_scores, f1_by_frequency_rank, per_category_f1,
    plot_data as plot_rows, ChrfConfig, EvalReport,
};
use subword::model::{check_marker_free, revert_line, serialize_line};
use subword::ngram::{segment_line_ngrams, NgramConfig};
use subword::stats::{compare_schemes, format_table, format_tsv, NamedScheme, Scheme};
use subword::translit::TransliterationTable;
use subword::{
    Encoder, Error, LearnConfig, MergeTable, SymbolSequence, SymbolVocabulary, UnknownReport,
    WordFrequencyTable,
};

use crate::files::{located, with_suffix, Failure, Input, Outcome, Output};
use crate::{
    ApplyArgs, ConsistencyArgs, EvalArgs, IoArgs, JointArgs, LearnArgs, Metric, NgramArgs,
    PlotArgs, StatsArgs, TranslitArgs, TranslitDirection, VocabArgs,
};

const CHUNK_LINES: usize = 8192;
const CACHE_LIMIT: usize = 1 << 20;

fn usage_or_located(name: &str, err: Error) -> Failure {
    match err {
        Error::Config(m) => Failure::Usage(m),
        other => located(name, other),
    }
}

fn read_table(path: &Path, dict_input: bool) -> Outcome<WordFrequencyTable> {
    let input = Input::open(Some(path))?;
    let name = input.name.clone();
    let table = if dict_input {
        WordFrequencyTable::read_frequency_file(input.reader)
    } else {
        WordFrequencyTable::from_reader(input.reader)
    };
    table.map_err(|e| located(&name, e))
}

fn read_merges(path: &Path) -> Outcome<MergeTable> {
    let input = Input::open(Some(path))?;
    let name = input.name.clone();
    MergeTable::read_from(input.reader).map_err(|e| located(&name, e))
}

fn read_translit(path: Option<&Path>) -> Outcome<TransliterationTable> {
    let Some(path) = path else {
        return Ok(TransliterationTable::iso9());
    };
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| crate::files::io_failure(&name, e))?;
    TransliterationTable::from_tsv(&text).map_err(|e| located(&name, e))
}

fn read_lines(path: &Path) -> Outcome<Vec<String>> {
    Input::open(Some(path))?.read_lines()
}

pub fn learn(a: LearnArgs) -> Outcome {
    let mut table = WordFrequencyTable::new();
    for path in &a.inputs {
        table.merge_from(&read_table(path, a.dict_input)?);
    }
    if table.is_empty() {
        return Err(Failure::Input("training input contains no words".into()));
    }
    let cfg = LearnConfig::new(a.merges as usize).with_min_frequency(a.min_frequency);
    let learned = if a.naive {
        learn_bpe_traced(&table, &cfg)
    } else {
        learn_bpe_indexed_traced(&table, &cfg)
    }
    .map_err(|e| usage_or_located("training input", e))?;
    let mut out = Output::create(a.output.as_deref())?;
    out.text(&learned.merges.to_file_string())?;
    out.finish()?;
    match learned.stop {
        StopReason::Completed => {}
        StopReason::BelowMinFrequency => eprintln!(
            "subword: stopped after {} merges: no pair occurs {} times",
            learned.merges.len(),
            a.min_frequency
        ),
        StopReason::NoPairs => eprintln!(
            "subword: stopped after {} merges: every word is a single symbol",
            learned.merges.len()
        ),
    }
    Ok(())
}

fn read_vocabulary(path: &Path, threshold: u64) -> Outcome<SymbolVocabulary> {
    let input = Input::open(Some(path))?;
    let name = input.name.clone();
    SymbolVocabulary::read_from(input.reader, threshold).map_err(|e| located(&name, e))
}

pub fn apply(a: ApplyArgs) -> Outcome {
    let encoder = Encoder::new(read_merges(&a.merges)?);
    let vocab = match &a.vocabulary {
        Some(p) => Some(read_vocabulary(p, a.vocab_threshold)?),
        None => None,
    };
    let input = Input::open(a.io.input.as_deref())?;
    let name = input.name.clone();
    let mut out = Output::create(a.io.output.as_deref())?;
    let mut cache: HashMap<String, WordSegmentation> = HashMap::new();
    let mut unknown = UnknownReport::default();
    let mut lines = input.lines();
    let mut done = 0;
    loop {
        let chunk: Vec<String> = lines.by_ref().take(CHUNK_LINES).collect::<Outcome<_>>()?;
        if chunk.is_empty() {
            break;
        }
        for (i, line) in chunk.iter().enumerate() {
            check_marker_free(line, done + i + 1).map_err(|e| located(&name, e))?;
        }
        if cache.len() > CACHE_LIMIT {
            cache.clear();
        }
        let mut seen = HashSet::new();
        let fresh: Vec<&str> = chunk
            .iter()
            .flat_map(|l| l.split_whitespace())
            .filter(|w| !cache.contains_key(*w) && seen.insert(*w))
            .collect();
        let segmented: Vec<(String, WordSegmentation)> = fresh
            .par_iter()
            .map(|w| {
                encoder
                    .segment_word(w, vocab.as_ref())
                    .map(|s| (w.to_string(), s))
            })
            .collect::<Result<_, _>>()
            .map_err(|e| located(&name, e))?;
        cache.extend(segmented);
        for line in &chunk {
            let words: Vec<&SymbolSequence> = line
                .split_whitespace()
                .map(|w| {
                    let seg = &cache[w];
                    unknown.record(&seg.unknown);
                    &seg.sequence
                })
                .collect();
            out.line(&serialize_line(words))?;
        }
        done += chunk.len();
    }
    out.finish()?;
    if vocab.is_some() && !unknown.is_empty() {
        eprintln!(
            "subword: {name}: {} unknown symbol occurrences, {} types",
            unknown.total(),
            unknown.counts.len()
        );
        for (symbol, count) in &unknown.counts {
            eprintln!("{symbol}\t{count}");
        }
    }
    Ok(())
}

pub fn revert(a: IoArgs) -> Outcome {
    let input = Input::open(a.input.as_deref())?;
    let name = input.name.clone();
    let mut out = Output::create(a.output.as_deref())?;
    for (idx, line) in input.lines().enumerate() {
        let reverted = revert_line(&line?, idx + 1).map_err(|e| located(&name, e))?;
        out.line(&reverted)?;
    }
    out.finish()
}

pub fn segment_ngrams(a: NgramArgs) -> Outcome {
    let mut cfg = NgramConfig::new(a.n as usize).map_err(|e| usage_or_located("", e))?;
    if a.shortlist > 0 {
        let Some(train) = &a.train else {
            return Err(Failure::Usage("--shortlist needs --train".into()));
        };
        cfg = cfg.with_shortlist(&read_table(train, a.dict_input)?, a.shortlist);
    }
    if a.detached_eow {
        cfg = cfg.detached();
    }
    let input = Input::open(a.io.input.as_deref())?;
    let name = input.name.clone();
    let mut out = Output::create(a.io.output.as_deref())?;
    for (idx, line) in input.lines().enumerate() {
        let seg = segment_line_ngrams(&line?, idx + 1, &cfg).map_err(|e| located(&name, e))?;
        out.line(&seg)?;
    }
    out.finish()
}

fn write_merges(path: &Path, table: &MergeTable) -> Outcome {
    let mut out = Output::create(Some(path))?;
    out.text(&table.to_file_string())?;
    out.finish()
}

pub fn joint_learn(a: JointArgs) -> Outcome {
    let source = read_table(&a.src, a.dict_input)?;
    let target = read_table(&a.tgt, a.dict_input)?;
    let translit = match (&a.table, a.bridge) {
        (Some(p), _) => Some(read_translit(Some(p))?),
        (None, Some(_)) => Some(TransliterationTable::iso9()),
        (None, None) => None,
    };
    let cfg = LearnConfig::new(a.merges as usize).with_min_frequency(a.min_frequency);
    let joint = learn_joint(&source, &target, &cfg, translit.as_ref())
        .map_err(|e| usage_or_located("training input", e))?;
    if joint.bridged {
        write_merges(&with_suffix(&a.output, ".src"), &joint.source)?;
        write_merges(&with_suffix(&a.output, ".tgt"), &joint.target)?;
        if !joint.dropped.is_empty() {
            eprintln!(
                "subword: {} of {} rules have no Cyrillic counterpart; the target table keeps their Latin form only",
                joint.dropped.len(),
                joint.source.len()
            );
        }
    } else {
        write_merges(&a.output, &joint.source)?;
    }
    Ok(())
}

fn parse_alignments(path: &Path) -> Outcome<Vec<Vec<(usize, usize)>>> {
    let name = path.display().to_string();
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(idx, line)| {
            line.split_whitespace()
                .map(|link| {
                    link.split_once('-')
                        .and_then(|(s, t)| Some((s.parse().ok()?, t.parse().ok()?)))
                        .ok_or_else(|| {
                            Failure::Input(format!("{name}:{}: bad alignment {link:?}", idx + 1))
                        })
                })
                .collect()
        })
        .collect()
}

pub fn consistency(a: ConsistencyArgs) -> Outcome {
    let src = read_lines(&a.src)?;
    let tgt = read_lines(&a.tgt)?;
    let links = parse_alignments(&a.alignments)?;
    let translit = read_translit(a.table.as_deref())?;
    let report = segmentation_consistency_report(&src, &tgt, &links, &translit)
        .map_err(|e| located(&a.alignments.display().to_string(), e))?;
    let mut out = Output::create(None)?;
    out.text(&format!(
        "pairs\t{}\nconsistent\t{}\nscore\t{:.6}\n",
        report.pairs, report.consistent, report.score
    ))?;
    for (line, s, t) in &report.mismatches {
        out.line(&format!("mismatch\t{line}\t{s}-{t}"))?;
    }
    out.finish()
}

pub fn translit(a: TranslitArgs) -> Outcome {
    let table = read_translit(a.table.as_deref())?;
    let input = Input::open(a.io.input.as_deref())?;
    let name = input.name.clone();
    let mut out = Output::create(a.io.output.as_deref())?;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let text = match a.direction {
            TranslitDirection::Cyr2lat => table.cyrillic_to_latin(&line),
            TranslitDirection::Lat2cyr => {
                let t = table.latin_to_cyrillic(&line);
                for span in &t.untranslatable {
                    eprintln!(
                        "subword: {name}:{}:{}: no Cyrillic preimage for {:?}",
                        idx + 1,
                        span.start + 1,
                        span.text
                    );
                }
                t.text
            }
        };
        out.line(&text)?;
    }
    out.finish()
}

pub fn vocab(a: VocabArgs) -> Outcome {
    let encoder = Encoder::new(read_merges(&a.merges)?);
    let input = Input::open(a.io.input.as_deref())?;
    let name = input.name.clone();
    let table = WordFrequencyTable::from_reader(input.reader).map_err(|e| located(&name, e))?;
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (word, count) in table.iter() {
        let seq = encoder.apply_merges(word).map_err(|e| located(&name, e))?;
        for symbol in seq.into_symbols() {
            *counts.entry(symbol).or_insert(0) += count;
        }
    }
    let vocab = SymbolVocabulary::from_counts(counts, a.threshold);
    let mut out = Output::create(a.io.output.as_deref())?;
    let mut buf = Vec::new();
    vocab
        .write_to(&mut buf)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    out.text(&String::from_utf8_lossy(&buf))?;
    out.finish()
}

fn parse_scheme(spec: &str, train: &[String]) -> Outcome<NamedScheme> {
    let bad = || Failure::Usage(format!("unknown scheme {spec:?}"));
    let mut parts = spec.splitn(2, ':');
    let kind = parts.next().unwrap_or_default();
    let rest = parts.next();
    match (kind, rest) {
        ("none", None) => Ok(NamedScheme::new("none", Scheme::None)),
        ("char", Some(args)) => {
            let mut nums = args
                .split(':')
                .map(|x| x.parse::<usize>().map_err(|_| bad()));
            let n = nums.next().ok_or_else(bad)??;
            let k = nums.next().transpose()?.unwrap_or(0);
            if nums.next().is_some() {
                return Err(bad());
            }
            let mut cfg = NgramConfig::new(n).map_err(|e| usage_or_located("", e))?;
            let mut label = match n {
                1 => "characters".to_string(),
                2 => "character bigrams".to_string(),
                3 => "character trigrams".to_string(),
                _ => format!("character {n}-grams"),
            };
            if k > 0 {
                cfg = cfg.with_shortlist(&WordFrequencyTable::from_lines(train), k);
                label = format!("{label} (shortlist {k})");
            }
            Ok(NamedScheme::new(label, Scheme::CharNgram(cfg)))
        }
        ("bpe", Some(path)) => Ok(NamedScheme::new(
            "BPE",
            Scheme::Bpe(Encoder::new(read_merges(Path::new(path))?)),
        )),
        ("joint", Some(path)) => Ok(NamedScheme::new(
            "BPE (joint)",
            Scheme::Bpe(Encoder::new(read_merges(Path::new(path))?)),
        )),
        ("pre", Some(args)) => {
            let mut p = args.splitn(3, ':');
            let (Some(label), Some(train), Some(test)) = (p.next(), p.next(), p.next()) else {
                return Err(bad());
            };
            Ok(NamedScheme::new(
                label,
                Scheme::Presegmented {
                    train: read_lines(Path::new(train))?,
                    test: read_lines(Path::new(test))?,
                },
            ))
        }
        _ => Err(bad()),
    }
}

pub fn stats(a: StatsArgs) -> Outcome {
    let train = read_lines(&a.train)?;
    let test = read_lines(&a.test)?;
    let schemes = a
        .schemes
        .iter()
        .map(|s| parse_scheme(s, &train))
        .collect::<Outcome<Vec<_>>>()?;
    let rows = schemes
        .par_iter()
        .map(|s| compare_schemes(&train, &test, std::slice::from_ref(s)).map(|mut r| r.remove(0)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| located(&a.test.display().to_string(), e))?;
    let mut out = Output::create(a.output.as_deref())?;
    out.text(&if a.tsv {
        format_tsv(&rows)
    } else {
        format_table(&rows)
    })?;
    out.finish()
}

fn line_counts_match(hyp: &[String], reference: &[String]) -> Outcome {
    if hyp.len() != reference.len() {
        return Err(Failure::Input(format!(
            "hypothesis has {} lines, reference has {}",
            hyp.len(),
            reference.len()
        )));
    }
    Ok(())
}

pub fn eval(a: EvalArgs) -> Outcome {
    let needs_train = a
        .metrics
        .iter()
        .any(|m| matches!(m, Metric::Categories | Metric::Bins));
    if needs_train && a.train.is_none() {
        return Err(Failure::Usage(
            "--metric categories/bins needs --train".into(),
        ));
    }
    let cfg = ChrfConfig {
        beta: a.beta,
        max_n: a.max_n,
        ..Default::default()
    };
    cfg.validate().map_err(|e| usage_or_located("", e))?;
    let hyp = read_lines(&a.hyp)?;
    let reference = read_lines(&a.reference)?;
    line_counts_match(&hyp, &reference)?;
    let train = match &a.train {
        Some(p) if needs_train => Some(read_table(p, a.dict_input)?),
        _ => None,
    };
    let internal = |e: Error| Failure::Internal(e.to_string());
    let mut report = EvalReport::default();
    for metric in &a.metrics {
        match metric {
            Metric::Chrf => {
                report.chrf = Some((chrf_corpus(&hyp, &reference, &cfg).map_err(internal)?, cfg))
            }
            Metric::F1 => {
                report.unigram = Some(corpus_unigram_scores(&hyp, &reference).map_err(internal)?)
            }
            Metric::Categories => {
                let train = train.as_ref().expect("checked above");
                report.categories =
                    Some(per_category_f1(&hyp, &reference, train, a.rare_rank).map_err(internal)?);
            }
            Metric::Bins => {
                let train = train.as_ref().expect("checked above");
                report.bins = f1_by_frequency_rank(&hyp, &reference, train).map_err(internal)?;
            }
        }
    }
    let mut out = Output::create(a.output.as_deref())?;
    out.text(&report.to_tsv())?;
    out.finish()
}

pub fn plot_data(a: PlotArgs) -> Outcome {
    let hyp = read_lines(&a.hyp)?;
    let reference = read_lines(&a.reference)?;
    line_counts_match(&hyp, &reference)?;
    let train = read_table(&a.train, a.dict_input)?;
    let bins = f1_by_frequency_rank(&hyp, &reference, &train)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let mut out = Output::create(a.output.as_deref())?;
    out.text(&plot_rows(&bins))?;
    out.finish()
}
