use super::{LearnConfig, Learned, Pair, StopReason, Vocab};
use crate::error::Result;
use crate::model::{MergeTable, WordFrequencyTable};

/// Reference learner: recounts all pairs and rewrites all words on every
/// iteration.
pub fn learn_bpe(table: &WordFrequencyTable, cfg: &LearnConfig) -> Result<MergeTable> {
    learn_bpe_traced(table, cfg).map(|l| l.merges)
}

pub fn learn_bpe_traced(table: &WordFrequencyTable, cfg: &LearnConfig) -> Result<Learned> {
    cfg.validate()?;
    let mut vocab = Vocab::from_table(table)?;
    let mut merges = MergeTable::new();
    let mut selected_counts = Vec::new();
    let mut stop = StopReason::Completed;

    for _ in 0..cfg.num_merges {
        let counts = vocab.pair_counts();
        let names = &vocab.interner;
        let best = counts.iter().max_by(|(pa, ca), (pb, cb)| {
            ca.cmp(cb).then_with(|| {
                let a = (names.name(pa.0), names.name(pa.1));
                let b = (names.name(pb.0), names.name(pb.1));
                b.cmp(&a)
            })
        });
        let Some((&pair, &count)) = best else {
            stop = StopReason::NoPairs;
            break;
        };
        if count < cfg.min_frequency {
            stop = StopReason::BelowMinFrequency;
            break;
        }
        apply(&mut vocab, pair, &mut merges);
        selected_counts.push(count);
    }

    Ok(Learned {
        merges,
        selected_counts,
        stop,
        segmentation: vocab.segmentation(),
    })
}

fn apply(vocab: &mut Vocab, pair: Pair, merges: &mut MergeTable) {
    let merged = vocab.interner.merged(pair);
    vocab.merge_ids(pair, merged);
    merges.push(
        vocab.interner.name(pair.0).to_string(),
        vocab.interner.name(pair.1).to_string(),
    );
}
