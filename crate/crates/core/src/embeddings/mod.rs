//! Skip-gram word embeddings trained with negative sampling.

mod io;
mod sgns;
mod train;

pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use sgns::{sgns_gradient, sgns_loss, sgns_step, SgnsGradient};
pub use train::{train, NegativeSampler, TrainReport};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum context distance; each center draws its own window in
    /// `1..=window`.
    pub window: usize,
    pub min_count: u64,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub seed: u64,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub subsample_t: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            min_count: 1,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            seed: 42,
            subsample_t: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.dim > u32::MAX as usize {
            return bad("dim too large");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("initial_lr must be positive");
        }
        if !(self.subsample_t >= 0.0 && self.subsample_t.is_finite()) {
            return bad("subsample_t must be non-negative");
        }
        Ok(())
    }
}

/// Input ("word") and output ("context") matrices over a vocabulary, stored
/// row-major as `f32`. Only the input rows are used as embeddings; the
/// output rows are kept so training can resume.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    vocab: Vocabulary,
    config: TrainConfig,
    pub(crate) input: Vec<f32>,
    pub(crate) output: Vec<f32>,
    /// Corpus the model was trained on; zero when unknown.
    pub corpus_hash: [u8; 32],
}

impl EmbeddingModel {
    /// Input rows uniform in `[-0.5/dim, 0.5/dim)`, output rows zero.
    pub fn init(vocab: Vocabulary, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        let mut rng = rng::seeded(config.seed, rng::streams::INIT);
        let scale = dim as f32;
        let bound = 0.5 / scale;
        let input = (0..vocab.len() * dim)
            .map(|_| {
                let v = (rng::unit_f32(&mut rng) - 0.5) / scale;
                // Division can round up onto the open bound.
                if v >= bound {
                    bound.next_down()
                } else {
                    v
                }
            })
            .collect();
        let output = vec![0.0; vocab.len() * dim];
        Ok(EmbeddingModel {
            vocab,
            config,
            input,
            output,
            corpus_hash: [0; 32],
        })
    }

    /// Builds a model from explicit row-major `V × dim` matrices.
    pub fn from_matrices(vocab: Vocabulary, config: TrainConfig, input: Vec<f32>, output: Vec<f32>) -> Result<Self> {
        config.validate()?;
        let expected = vocab.len() * config.dim;
        for m in [&input, &output] {
            if m.len() != expected {
                return Err(Error::DimMismatch {
                    expected,
                    found: m.len(),
                });
            }
        }
        Ok(Self::from_parts(vocab, config, input, output, [0; 32]))
    }

    pub(crate) fn from_parts(
        vocab: Vocabulary,
        config: TrainConfig,
        input: Vec<f32>,
        output: Vec<f32>,
        corpus_hash: [u8; 32],
    ) -> Self {
        debug_assert_eq!(input.len(), vocab.len() * config.dim);
        debug_assert_eq!(output.len(), vocab.len() * config.dim);
        EmbeddingModel {
            vocab,
            config,
            input,
            output,
            corpus_hash,
        }
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn input_vectors(&self) -> &[f32] {
        &self.input
    }

    pub fn output_vectors(&self) -> &[f32] {
        &self.output
    }

    pub fn row(&self, id: u32) -> Option<&[f32]> {
        let d = self.dim();
        let start = id as usize * d;
        self.input.get(start..start + d)
    }

    pub fn output_row(&self, id: u32) -> Option<&[f32]> {
        let d = self.dim();
        let start = id as usize * d;
        self.output.get(start..start + d)
    }

    /// Embedding of `token`, or `None` when it is out of vocabulary.
    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        self.vocab.id(token).and_then(|id| self.row(id))
    }

    /// Cosine similarity between two in-vocabulary tokens.
    pub fn similarity(&self, a: &str, b: &str) -> Option<Result<f64>> {
        Some(crate::linalg::cosine(self.vector(a)?, self.vector(b)?))
    }

    pub fn all_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|x| x.is_finite())
    }
}

/// Same as [`EmbeddingModel::init`].
pub fn init_model(vocab: Vocabulary, config: TrainConfig) -> Result<EmbeddingModel> {
    EmbeddingModel::init(vocab, config)
}
