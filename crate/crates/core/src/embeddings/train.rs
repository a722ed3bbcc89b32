use super::sgns::{step_raw, StepScratch};
use super::{EmbeddingModel, TrainConfig};
use crate::corpus::{SentenceStream, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::{self, SeededRng};

/// Draws token ids with probability proportional to `count^0.75`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub const POWER: f64 = 0.75;

    pub fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(Self::POWER);
                acc
            })
            .collect();
        NegativeSampler { cumulative }
    }

    /// Normalized sampling probability per id.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total();
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn sample(&self, rng: &mut SeededRng) -> u32 {
        let target = rng::unit_f64(rng) * self.total();
        let i = self.cumulative.partition_point(|&c| c <= target);
        i.min(self.cumulative.len() - 1) as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-pair loss of each epoch, evaluated before each update.
    pub epoch_losses: Vec<f64>,
    pub total_pairs: u64,
}

/// Subsampling keep-probabilities, `None` when disabled.
fn keep_probabilities(vocab: &Vocabulary, t: f64) -> Option<Vec<f64>> {
    if t <= 0.0 {
        return None;
    }
    let threshold = t * vocab.total_tokens() as f64;
    Some(
        vocab
            .counts()
            .iter()
            .map(|&c| {
                let f = c as f64;
                ((f / threshold).sqrt() + 1.0) * threshold / f
            })
            .collect(),
    )
}

/// Replays the random part of the schedule for one sentence: subsampling
/// and per-center window sizes. Both the counting pass and the training
/// pass call this with identically seeded generators.
fn plan_sentence(
    rng: &mut SeededRng,
    sentence: &[u32],
    keep: Option<&[f64]>,
    window: usize,
    kept: &mut Vec<u32>,
    windows: &mut Vec<usize>,
) {
    kept.clear();
    match keep {
        None => kept.extend_from_slice(sentence),
        Some(keep) => {
            for &id in sentence {
                let p = keep[id as usize];
                if p >= 1.0 || rng::unit_f64(rng) < p {
                    kept.push(id);
                }
            }
        }
    }
    windows.clear();
    windows.extend((0..kept.len()).map(|_| 1 + rng::below(rng, window)));
}

#[inline]
fn context_span(pos: usize, b: usize, len: usize) -> std::ops::RangeInclusive<usize> {
    pos.saturating_sub(b)..=(pos + b).min(len - 1)
}

/// Trains skip-gram embeddings over `stream`, single-threaded.
///
/// Every center token draws a window `b` in `1..=window`, pairs with each
/// token within distance `b`, and each pair draws `negatives` noise tokens
/// (draws equal to the context token are skipped). The learning rate decays
/// linearly from `initial_lr` to `initial_lr / 100` across all pairs of all
/// epochs; the pair total is known up front by replaying the schedule RNG.
pub fn train(
    stream: &SentenceStream,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, TrainReport)> {
    config.validate()?;
    if stream.token_count() == 0 {
        return Err(Error::EmptyInput("sentence stream has no tokens"));
    }
    let v = vocab.len();
    if let Some(&bad) = stream.sentences.iter().flatten().find(|&&id| id as usize >= v) {
        return Err(Error::IdOutOfRange {
            id: bad as usize,
            len: v,
        });
    }

    let mut model = EmbeddingModel::init(vocab.clone(), config.clone())?;
    let keep = keep_probabilities(vocab, config.subsample_t);
    let keep = keep.as_deref();
    let (mut kept, mut windows) = (Vec::new(), Vec::new());

    let mut schedule = rng::seeded(config.seed, rng::streams::SCHEDULE);
    let mut total_pairs = 0u64;
    for _ in 0..config.epochs {
        for sentence in &stream.sentences {
            plan_sentence(&mut schedule, sentence, keep, config.window, &mut kept, &mut windows);
            for (pos, &b) in windows.iter().enumerate() {
                total_pairs += context_span(pos, b, kept.len()).count() as u64 - 1;
            }
        }
    }

    let sampler = NegativeSampler::new(vocab.counts());
    let mut schedule = rng::seeded(config.seed, rng::streams::SCHEDULE);
    let mut noise = rng::seeded(config.seed, rng::streams::NEGATIVES);
    let mut scratch = StepScratch::default();
    let mut negatives = Vec::with_capacity(config.negatives);
    let lr0 = config.initial_lr;
    let dim = config.dim;
    let mut done = 0u64;
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        let (mut loss_sum, mut pairs) = (0.0, 0u64);
        for sentence in &stream.sentences {
            plan_sentence(&mut schedule, sentence, keep, config.window, &mut kept, &mut windows);
            for (pos, &b) in windows.iter().enumerate() {
                let center = kept[pos];
                for c in context_span(pos, b, kept.len()) {
                    if c == pos {
                        continue;
                    }
                    let context = kept[c];
                    negatives.clear();
                    for _ in 0..config.negatives {
                        let n = sampler.sample(&mut noise);
                        if n != context {
                            negatives.push(n);
                        }
                    }
                    let progress = done as f64 / total_pairs.max(1) as f64;
                    let lr = lr0 * (1.0 - 0.99 * progress);
                    loss_sum += step_raw(
                        &mut model.input,
                        &mut model.output,
                        dim,
                        center,
                        context,
                        &negatives,
                        lr,
                        &mut scratch,
                    );
                    pairs += 1;
                    done += 1;
                }
            }
        }
        epoch_losses.push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
    }

    Ok((
        model,
        TrainReport {
            epoch_losses,
            total_pairs,
        },
    ))
}
