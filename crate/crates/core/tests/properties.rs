mod common;

use std::collections::BTreeSet;

use proptest::collection::{btree_map, vec};
use proptest::prelude::*;
use subword::apply::apply_to_corpus;
use subword::joint::segment_via_bridge;
use subword::learn::learn_bpe_traced;
use subword::metrics::{chrf, chrf_corpus, clipped_unigram_scores, ChrfConfig};
use subword::ngram::{segment_corpus_ngrams, segment_ngrams, NgramConfig};
use subword::translit::{Direction, TransliterationTable};
use subword::{
    build_network_vocabulary, learn_bpe, learn_bpe_indexed, revert_segmentation, Encoder,
    LearnConfig, MergeTable, SymbolVocabulary, WordFrequencyTable,
};

use common::*;

fn table_strategy(
    alphabet: &'static str,
    max_types: usize,
    max_len: usize,
) -> impl Strategy<Value = WordFrequencyTable> {
    let word = format!("[{alphabet}]{{1,{max_len}}}");
    btree_map(
        proptest::string::string_regex(&word).unwrap(),
        1u64..=50,
        1..=max_types,
    )
    .prop_map(|m| {
        let mut t = WordFrequencyTable::new();
        for (w, c) in m {
            t.add(&w, c).unwrap();
        }
        t
    })
}

fn small_table() -> impl Strategy<Value = WordFrequencyTable> {
    prop_oneof![
        table_strategy("ab", 40, 12),
        table_strategy("a-f", 80, 20),
        table_strategy("aeinrstéжя語", 200, 20),
    ]
}

fn config() -> impl Strategy<Value = LearnConfig> {
    (1usize..=300, 1u64..=3).prop_map(|(n, f)| LearnConfig::new(n).with_min_frequency(f))
}

fn unicode_word() -> impl Strategy<Value = String> {
    "[^\\s]{1,10}".prop_filter("no continuation marker", |w| !w.contains("@@"))
}

fn unicode_corpus() -> impl Strategy<Value = Vec<String>> {
    vec(vec(unicode_word(), 0..8).prop_map(|ws| ws.join(" ")), 1..12)
}

fn cyrillic_word() -> impl Strategy<Value = String> {
    "[абвгдежзийклмнопрстуфхцчшщыэюя]{1,10}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn learners_agree(table in small_table(), cfg in config()) {
        let naive = learn_bpe(&table, &cfg).unwrap();
        let indexed = learn_bpe_indexed(&table, &cfg).unwrap();
        prop_assert_eq!(naive.to_file_string(), indexed.to_file_string());
        let reference = oracle_learn(&table, cfg.num_merges, cfg.min_frequency);
        prop_assert_eq!(naive.to_file_string(), oracle_merge_file(&reference.merges));
    }

    #[test]
    fn replay_reproduces_training_segmentation(table in small_table(), cfg in config()) {
        let learned = learn_bpe_traced(&table, &cfg).unwrap();
        let encoder = Encoder::new(learned.merges.clone());
        for (word, seq) in &learned.segmentation {
            prop_assert_eq!(&encoder.apply_merges(word).unwrap(), seq);
        }
    }

    #[test]
    fn learning_is_deterministic(table in small_table(), cfg in config()) {
        let mut reversed = WordFrequencyTable::new();
        let entries: Vec<_> = table.iter().collect();
        for (w, c) in entries.into_iter().rev() {
            reversed.add(w, c).unwrap();
        }
        prop_assert_eq!(learn_bpe_indexed(&table, &cfg).unwrap(), learn_bpe_indexed(&reversed, &cfg).unwrap());
    }

    #[test]
    fn selection_counts_never_increase(table in small_table(), cfg in config()) {
        let learned = learn_bpe_traced(&table, &cfg).unwrap();
        prop_assert!(learned.selected_counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(learned.selected_counts.iter().all(|&c| c >= cfg.min_frequency));
        prop_assert_eq!(learned.selected_counts.len(), learned.merges.len());
    }

    #[test]
    fn symbol_types_grow_at_most_one_per_merge(table in small_table(), cfg in config()) {
        let learned = learn_bpe_traced(&table, &cfg).unwrap();
        let chars: BTreeSet<char> = table.iter().flat_map(|(w, _)| w.chars()).collect();
        let types: BTreeSet<&String> = learned.segmentation.values().flat_map(|s| s.symbols()).collect();
        prop_assert!(types.len() <= chars.len() + 1 + learned.merges.len());
    }

    #[test]
    fn every_merge_shrinks_the_corpus(table in small_table(), cfg in config()) {
        let merges = learn_bpe(&table, &cfg).unwrap();
        let size = |k: usize| -> u64 {
            let encoder = Encoder::new(MergeTable::from_pairs(merges.pairs().take(k)));
            table.iter().map(|(w, c)| encoder.apply_merges(w).unwrap().len() as u64 * c).sum()
        };
        let step = (merges.len() / 25).max(1);
        let mut previous = size(0);
        prop_assert_eq!(previous, table.iter().map(|(w, c)| (w.chars().count() as u64 + 1) * c).sum::<u64>());
        for k in (step..=merges.len()).step_by(step) {
            let current = size(k);
            prop_assert!(current + step as u64 <= previous, "merges {}..{} saved too little", k - step, k);
            previous = current;
        }
    }

    #[test]
    fn merge_file_roundtrip(table in small_table(), cfg in config()) {
        let merges = learn_bpe(&table, &cfg).unwrap();
        prop_assert_eq!(MergeTable::parse(&merges.to_file_string()).unwrap(), merges);
    }

    #[test]
    fn frequency_file_roundtrip(table in small_table()) {
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        prop_assert_eq!(WordFrequencyTable::read_frequency_file(&buf[..]).unwrap(), table);
    }

    #[test]
    fn bpe_segmentation_reverts(corpus in unicode_corpus(), other in unicode_corpus(), merges in 1usize..80) {
        let table = WordFrequencyTable::from_lines(&corpus);
        prop_assume!(!table.is_empty());
        let encoder = Encoder::new(learn_bpe(&table, &LearnConfig::new(merges).with_min_frequency(1)).unwrap());
        for text in [&corpus, &other] {
            let seg = apply_to_corpus(text.iter(), &encoder, None).unwrap();
            let back = revert_segmentation(&seg.lines).unwrap();
            prop_assert_eq!(&back, text);
        }
    }

    #[test]
    fn ngram_segmentation_reverts(corpus in unicode_corpus(), n in 1usize..6, k in 0usize..6, detached: bool) {
        let table = WordFrequencyTable::from_lines(&corpus);
        let mut cfg = NgramConfig::new(n).unwrap().with_shortlist(&table, k);
        if detached {
            cfg = cfg.detached();
        }
        let seg = segment_corpus_ngrams(&corpus, &cfg).unwrap();
        prop_assert_eq!(revert_segmentation(&seg).unwrap(), corpus);
    }

    #[test]
    fn ngram_chunk_counts(word in unicode_word(), n in 1usize..6) {
        let len = word.chars().count();
        let attached = segment_ngrams(&word, &NgramConfig::new(n).unwrap()).unwrap();
        prop_assert_eq!(attached.len(), len.div_ceil(n));
        let detached = segment_ngrams(&word, &NgramConfig::new(n).unwrap().detached()).unwrap();
        prop_assert_eq!(detached.len(), len.div_ceil(n) + 1);
        prop_assert_eq!(attached.word(), word);
    }

    #[test]
    fn larger_shortlists_never_add_tokens(corpus in unicode_corpus(), n in 1usize..4, k in 0usize..8) {
        let table = WordFrequencyTable::from_lines(&corpus);
        let tokens = |k| {
            let cfg = NgramConfig::new(n).unwrap().with_shortlist(&table, k);
            segment_corpus_ngrams(&corpus, &cfg).unwrap().iter().map(|l| l.split_whitespace().count()).sum::<usize>()
        };
        prop_assert!(tokens(k + 1) <= tokens(k));
    }

    #[test]
    fn training_corpus_has_no_unknowns(corpus in unicode_corpus(), merges in 1usize..100, threshold in 1u64..4) {
        let table = WordFrequencyTable::from_lines(&corpus);
        prop_assume!(!table.is_empty());
        let encoder = Encoder::new(learn_bpe_indexed(&table, &LearnConfig::new(merges).with_min_frequency(1)).unwrap());
        let plain = apply_to_corpus(corpus.iter(), &encoder, None).unwrap();
        let full = build_network_vocabulary(plain.words.iter().flatten(), 1);
        prop_assert!(apply_to_corpus(corpus.iter(), &encoder, Some(&full)).unwrap().unknown.is_empty());

        // With a frequency threshold, splitting still reproduces the words and
        // only irreducible symbols can be unknown.
        let filtered = full.filtered(threshold);
        let seg = apply_to_corpus(corpus.iter(), &encoder, Some(&filtered)).unwrap();
        prop_assert_eq!(revert_segmentation(&seg.lines).unwrap(), corpus.clone());
        for symbol in seg.unknown.counts.keys() {
            prop_assert!(symbol == "</w>" || symbol.chars().count() == 1 || symbol.strip_suffix("</w>").is_some_and(|s| s.chars().count() == 1));
        }
    }

    #[test]
    fn splitting_preserves_symbol_text(table in small_table(), cfg in config(), keep in 0u64..20) {
        let encoder = Encoder::new(learn_bpe(&table, &cfg).unwrap());
        let learned = learn_bpe_traced(&table, &cfg).unwrap();
        let vocab = build_network_vocabulary(learned.segmentation.values(), 1).filtered(keep);
        let chars_only = SymbolVocabulary::from_counts(
            table.iter().flat_map(|(w, _)| w.chars().map(|c| (c.to_string(), 1))).chain([("</w>".to_string(), 1)]),
            1,
        );
        for rule in encoder.table().rules() {
            let symbol = rule.result();
            for v in [&vocab, &chars_only] {
                let pieces = encoder.split_to_known(&symbol, v).unwrap();
                let joined: String = pieces.iter().map(|p| p.symbol.as_str()).collect();
                prop_assert_eq!(&joined, &symbol);
                prop_assert!(pieces.iter().all(|p| !p.known || v.contains(&p.symbol)));
            }
            let pieces = encoder.split_to_known(&symbol, &chars_only).unwrap();
            prop_assert!(pieces.iter().all(|p| p.known));
        }
    }

    #[test]
    fn transliteration_roundtrip(text in "[абвгдеёжзийклмнопрстуфхцчшщъыьэюяАБВГДЕЁЖЗИЙКЛМНОПРСТУФХЦЧШЩЪЫЬЭЮЯѓђєѕіїќћўѣѫѵ 0-9,.!?-]{0,40}") {
        let t = TransliterationTable::iso9();
        let latin = t.cyrillic_to_latin(&text);
        let back = t.latin_to_cyrillic(&latin);
        prop_assert_eq!(back.text, text);
        prop_assert!(back.untranslatable.is_empty());
    }

    #[test]
    fn bridge_commutes(ru in vec(cyrillic_word(), 1..30), en in vec("[a-z]{1,8}", 0..30), probe in vec(cyrillic_word(), 1..10)) {
        let t = TransliterationTable::iso9();
        let mut union = WordFrequencyTable::from_lines(&en);
        for w in &ru {
            union.add(&t.cyrillic_to_latin(w), 2).unwrap();
        }
        let latin_table = learn_bpe_indexed(&union, &LearnConfig::new(80)).unwrap();
        let cyr = Encoder::new(t.transliterate_merge_table(&latin_table, Direction::LatinToCyrillic).table);
        let latin = Encoder::new(latin_table);
        for w in ru.iter().chain(&probe) {
            prop_assert_eq!(cyr.apply_merges(w).unwrap(), segment_via_bridge(w, &latin, &t).unwrap());
        }
    }

    #[test]
    fn chrf_matches_reference(h in "[abc ]{0,12}", r in "[abc ]{0,12}", max_n in 1usize..7, beta in 0.5f64..4.0) {
        let cfg = ChrfConfig { beta, max_n, ..Default::default() };
        let got = chrf(&h, &r, &cfg).unwrap();
        let want = chrf_oracle(&h, &r, beta, max_n);
        prop_assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
        prop_assert!((0.0..=100.0).contains(&got));
        prop_assert_eq!(chrf_corpus(&[&h], &[&r], &cfg).unwrap(), got);
    }

    #[test]
    fn chrf_is_symmetric_at_beta_one(h in "[ab]{0,8}", r in "[ab]{0,8}") {
        let cfg = ChrfConfig { beta: 1.0, ..Default::default() };
        let forward = chrf(&h, &r, &cfg).unwrap();
        let backward = chrf(&r, &h, &cfg).unwrap();
        prop_assert!((forward - backward).abs() <= 1e-9);
    }

    #[test]
    fn clipped_scores_match_reference(h in vec("[abcd]", 1..12), r in vec("[abcd]", 1..12)) {
        let h: Vec<&str> = h.iter().map(String::as_str).collect();
        let r: Vec<&str> = r.iter().map(String::as_str).collect();
        let got = clipped_unigram_scores(&h, &r);
        let (p, rc, f) = clipped_oracle(&h, &r);
        prop_assert!((got.precision - p).abs() <= 1e-12);
        prop_assert!((got.recall - rc).abs() <= 1e-12);
        prop_assert!((got.f1 - f).abs() <= 1e-12);
    }
}
