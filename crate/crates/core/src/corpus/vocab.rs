use std::collections::HashMap;

use crate::error::{Error, Result};

/// Dense token ids ordered by descending corpus frequency, ties broken by
/// lexicographic token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, u32>,
    id_to_token: Vec<String>,
    counts: Vec<u64>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Counts tokens over `sentences` and keeps those seen at least
    /// `min_count` times.
    pub fn build<S: AsRef<[String]>>(sentences: &[S], min_count: u64) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for sentence in sentences {
            for token in sentence.as_ref() {
                *freq.entry(token.as_str()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = freq.into_iter().filter(|&(_, c)| c >= min_count).collect();
        if kept.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Self::from_entries(kept.into_iter().map(|(t, c)| (t.to_owned(), c)))
    }

    /// Rebuilds a vocabulary from `(token, count)` pairs in id order.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, u64)>) -> Result<Self> {
        let mut vocab = Vocabulary {
            token_to_id: HashMap::new(),
            id_to_token: Vec::new(),
            counts: Vec::new(),
            total_tokens: 0,
        };
        for (token, count) in entries {
            let id = vocab.id_to_token.len() as u32;
            if vocab.token_to_id.insert(token.clone(), id).is_some() {
                return Err(Error::format("vocabulary", format!("duplicate token `{token}`")));
            }
            vocab.id_to_token.push(token);
            vocab.counts.push(count);
            vocab.total_tokens += count;
        }
        if vocab.id_to_token.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(String::as_str)
    }

    pub fn count(&self, id: u32) -> Option<u64> {
        self.counts.get(id as usize).copied()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, u64)> + '_ {
        self.id_to_token
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(i, (t, &c))| (i as u32, t.as_str(), c))
    }
}

/// Where a sentence came from: the record and the position of the text
/// column within the record's `text` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRef {
    pub row_id: usize,
    pub column: usize,
}

/// Token-id sentences, one per `(record, text column)` cell in record order.
/// Out-of-vocabulary tokens are dropped; empty sentences are kept so that
/// `origins[i]` always names the cell behind `sentences[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceStream {
    pub sentences: Vec<Vec<u32>>,
    pub origins: Vec<CellRef>,
}

impl SentenceStream {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}
