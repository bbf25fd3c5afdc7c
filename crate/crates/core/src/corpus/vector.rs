use std::collections::HashMap;

use super::Topic;
use crate::error::{Error, Result};

/// Sparse vector with strictly ascending indices and no explicit zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from unordered pairs; duplicate indices are summed
    /// and zero weights dropped.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|&(_, w)| w != 0.0);
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    /// Cosine similarity; 0 when either vector is zero.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        (self.dot(other) / denom).clamp(-1.0, 1.0)
    }

    pub fn normalized(&self) -> SparseVector {
        let n = self.norm();
        if n == 0.0 {
            return SparseVector::default();
        }
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w / n)).collect(),
        }
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, x)), Some(&&(j, y))) => {
                    if i < j {
                        out.push((i, x));
                        a.next();
                    } else if j < i {
                        out.push((j, y));
                        b.next();
                    } else {
                        out.push((i, x + y));
                        a.next();
                        b.next();
                    }
                }
                (Some(&&e), None) => {
                    out.push(e);
                    a.next();
                }
                (None, Some(&&e)) => {
                    out.push(e);
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|&(_, w)| w != 0.0);
        SparseVector { entries: out }
    }

    /// Sum of all vectors, normalized to unit length.
    pub fn centroid<'a>(vectors: impl IntoIterator<Item = &'a SparseVector>) -> SparseVector {
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for v in vectors {
            for &(i, w) in &v.entries {
                *acc.entry(i).or_insert(0.0) += w;
            }
        }
        SparseVector::from_pairs(acc.into_iter().collect()).normalized()
    }
}

/// TF-IDF model with sentences as documents.
///
/// `idf(t) = ln(1 + n_docs / (1 + df(t)))`, which stays strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Vectorizer {
    vocabulary: HashMap<String, usize>,
    idf: Vec<f64>,
    n_docs: usize,
}

impl Vectorizer {
    /// Fits over token lists, assigning indices in first-seen order.
    pub fn fit<'a, I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut vocabulary: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<usize> = Vec::new();
        let mut n_docs = 0;
        let mut seen_in_doc: Vec<usize> = Vec::new();
        for doc in docs {
            n_docs += 1;
            for tok in doc {
                let tok = tok.as_ref();
                let idx = match vocabulary.get(tok) {
                    Some(&i) => i,
                    None => {
                        let i = df.len();
                        vocabulary.insert(tok.to_string(), i);
                        df.push(0);
                        seen_in_doc.push(0);
                        i
                    }
                };
                // documents are numbered from 1 so 0 means "never seen"
                if seen_in_doc[idx] != n_docs {
                    seen_in_doc[idx] = n_docs;
                    df[idx] += 1;
                }
            }
        }
        if n_docs == 0 {
            return Err(Error::EmptyCorpus);
        }
        let n = n_docs as f64;
        let idf = df.iter().map(|&f| (1.0 + n / (1.0 + f as f64)).ln()).collect();
        Ok(Vectorizer {
            vocabulary,
            idf,
            n_docs,
        })
    }

    pub fn vocab_len(&self) -> usize {
        self.idf.len()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.vocabulary.get(token).copied()
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.index_of(token).map(|i| self.idf[i])
    }

    /// Raw `tf * idf` weights, without normalization.
    pub fn weights<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let pairs = tokens
            .iter()
            .filter_map(|t| self.index_of(t.as_ref()))
            .map(|i| (i, self.idf[i]))
            .collect();
        SparseVector::from_pairs(pairs)
    }

    /// L2-normalized TF-IDF vector; out-of-vocabulary tokens are dropped.
    pub fn vectorize<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        self.weights(tokens).normalized()
    }
}

/// Fits a [`Vectorizer`] over every sentence of the topic.
pub fn build_vectorizer(topic: &Topic) -> Result<Vectorizer> {
    Vectorizer::fit(topic.sentences().map(|s| s.tokens.as_slice()))
}
