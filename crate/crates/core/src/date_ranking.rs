//! Supervised date scoring: a ridge regressor over per-date features.

use std::collections::HashSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::Topic;
use crate::error::{Error, Result};
use crate::temporal::{candidate_dates, DateCandidate};

pub const N_FEATURES: usize = 9;

pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Feature vector of a candidate date, in this order:
///
/// | idx | feature |
/// |-----|---------|
/// | 0 | `ln(1 + mention_count)` |
/// | 1 | `ln(1 + pub_article_count)` |
/// | 2 | `ln(1 + pub_sentence_count)` |
/// | 3..=5 | `ln(1 + m)` where `m` counts mentions of *other* dates within ±1, ±3, ±7 days |
/// | 6 | share of the topic's mentions that name this date |
/// | 7 | `(date - first publication) / duration`, clamped to [0, 1] |
/// | 8 | `(last publication - date) / duration`, clamped to [0, 1] |
///
/// Both positions are 0 when the topic spans a single day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DateFeatures(pub [f64; N_FEATURES]);

const WINDOWS: [i64; 3] = [1, 3, 7];

/// Precomputed per-topic context for featurizing many candidates.
pub struct DateFeaturizer {
    dates: Vec<NaiveDate>,
    /// prefix[i] = total mentions of dates[..i]
    prefix: Vec<usize>,
    total_mentions: usize,
    first_pub: NaiveDate,
    last_pub: NaiveDate,
}

impl DateFeaturizer {
    /// `candidates` must be sorted ascending by date, as returned by
    /// [`candidate_dates`].
    pub fn new(topic: &Topic, candidates: &[DateCandidate]) -> Self {
        let (first_pub, last_pub) = topic.publication_range();
        let mut prefix = Vec::with_capacity(candidates.len() + 1);
        prefix.push(0);
        for c in candidates {
            prefix.push(prefix.last().unwrap() + c.mention_count);
        }
        DateFeaturizer {
            dates: candidates.iter().map(|c| c.date).collect(),
            total_mentions: *prefix.last().unwrap(),
            prefix,
            first_pub,
            last_pub,
        }
    }

    fn mentions_between(&self, lo: NaiveDate, hi: NaiveDate) -> usize {
        let a = self.dates.partition_point(|&d| d < lo);
        let b = self.dates.partition_point(|&d| d <= hi);
        self.prefix[b] - self.prefix[a]
    }

    pub fn features(&self, c: &DateCandidate) -> DateFeatures {
        let ln1p = |x: usize| (x as f64).ln_1p();
        let mut f = [0.0; N_FEATURES];
        f[0] = ln1p(c.mention_count);
        f[1] = ln1p(c.pub_article_count);
        f[2] = ln1p(c.pub_sentence_count);
        for (slot, w) in WINDOWS.iter().enumerate() {
            let around = self.mentions_between(
                c.date - chrono::Duration::days(*w),
                c.date + chrono::Duration::days(*w),
            );
            f[3 + slot] = ln1p(around.saturating_sub(c.mention_count));
        }
        f[6] = if self.total_mentions == 0 {
            0.0
        } else {
            c.mention_count as f64 / self.total_mentions as f64
        };
        let duration = (self.last_pub - self.first_pub).num_days();
        if duration > 0 {
            let dur = duration as f64;
            f[7] = ((c.date - self.first_pub).num_days() as f64 / dur).clamp(0.0, 1.0);
            f[8] = ((self.last_pub - c.date).num_days() as f64 / dur).clamp(0.0, 1.0);
        }
        DateFeatures(f)
    }
}

/// Features of one candidate. Prefer [`DateFeaturizer`] for many candidates.
pub fn date_features(c: &DateCandidate, topic: &Topic) -> Result<DateFeatures> {
    let candidates = candidate_dates(topic)?;
    Ok(DateFeaturizer::new(topic, &candidates).features(c))
}

/// Linear date scorer `score = w · x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regressor {
    pub weights: [f64; N_FEATURES],
    pub bias: f64,
    #[serde(rename = "lambda")]
    pub l2_lambda: f64,
}

impl Regressor {
    pub fn predict(&self, x: &DateFeatures) -> f64 {
        self.weights.iter().zip(x.0.iter()).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Solves ridge regression with an unregularized intercept:
/// minimizes `|Xw + b - y|^2 + lambda |w|^2`.
///
/// Builds the augmented normal equations `[[XᵀX + λI, Xᵀ1], [1ᵀX, n]]` and
/// solves them by Gaussian elimination with partial pivoting.
pub fn ridge_fit(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    assert_eq!(x.len(), y.len(), "row count mismatch");
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = x[0].len();
    let m = d + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, &target) in x.iter().zip(y) {
        for i in 0..m {
            let xi = if i < d { row[i] } else { 1.0 };
            for j in i..m {
                let xj = if j < d { row[j] } else { 1.0 };
                a[i][j] += xi * xj;
            }
            a[i][m] += xi * target;
        }
    }
    for i in 0..m {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    for (i, row) in a.iter_mut().enumerate().take(d) {
        row[i] += lambda;
    }
    let sol = solve_augmented(a)?;
    Ok((sol[..d].to_vec(), sol[d]))
}

fn solve_augmented(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let m = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::SingularSystem);
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= 1e-12 * scale {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        for r in col + 1..m {
            let factor = a[r][col] / a[col][col];
            if factor != 0.0 {
                for c in col..=m {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    let mut sol = vec![0.0; m];
    for i in (0..m).rev() {
        let tail: f64 = (i + 1..m).map(|j| a[i][j] * sol[j]).sum();
        sol[i] = (a[i][m] - tail) / a[i][i];
    }
    Ok(sol)
}

/// Feature rows and binary targets (1 when the date is in any reference
/// timeline of the topic) for one topic.
pub fn training_rows(topic: &Topic) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let candidates = candidate_dates(topic)?;
    let featurizer = DateFeaturizer::new(topic, &candidates);
    let gold: HashSet<NaiveDate> = topic
        .reference_timelines
        .iter()
        .flat_map(|t| t.dates())
        .collect();
    let rows = candidates
        .iter()
        .map(|c| featurizer.features(c).0.to_vec())
        .collect();
    let targets = candidates
        .iter()
        .map(|c| if gold.contains(&c.date) { 1.0 } else { 0.0 })
        .collect();
    Ok((rows, targets))
}

/// Trains on every topic that has at least one reference timeline.
pub fn train_regressor(training_topics: &[&Topic], l2_lambda: f64) -> Result<Regressor> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for topic in training_topics.iter().filter(|t| !t.reference_timelines.is_empty()) {
        let (rows, targets) = training_rows(topic)?;
        x.extend(rows);
        y.extend(targets);
    }
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (w, bias) = ridge_fit(&x, &y, l2_lambda)?;
    let mut weights = [0.0; N_FEATURES];
    weights.copy_from_slice(&w);
    Ok(Regressor {
        weights,
        bias,
        l2_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredDate {
    pub candidate: DateCandidate,
    pub score: f64,
}

/// Orders by score descending, then by earlier date.
pub fn rank_scored(mut scored: Vec<ScoredDate>) -> Vec<ScoredDate> {
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.candidate.date.cmp(&b.candidate.date))
    });
    scored
}

/// Scores every candidate date of the topic, best first.
pub fn score_dates(r: &Regressor, topic: &Topic) -> Result<Vec<ScoredDate>> {
    let candidates = candidate_dates(topic)?;
    let featurizer = DateFeaturizer::new(topic, &candidates);
    let scored = candidates
        .into_iter()
        .map(|c| {
            let score = r.predict(&featurizer.features(&c));
            ScoredDate { candidate: c, score }
        })
        .collect();
    Ok(rank_scored(scored))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(date: &str, mentions: usize, arts: usize, sents: usize) -> DateCandidate {
        DateCandidate {
            date: date.parse().unwrap(),
            mention_count: mentions,
            pub_article_count: arts,
            pub_sentence_count: sents,
        }
    }

    #[test]
    fn separable_two_points_interpolate() {
        let mut a = vec![0.0; N_FEATURES];
        let mut b = vec![0.0; N_FEATURES];
        a[0] = 1.0;
        b[1] = 2.0;
        let y = [0.0, 1.0];
        let (w, bias) = ridge_fit(&[a.clone(), b.clone()], &y, 1e-9).unwrap();
        let pred = |x: &[f64]| x.iter().zip(&w).map(|(p, q)| p * q).sum::<f64>() + bias;
        assert!((pred(&a) - 0.0).abs() < 1e-6);
        assert!((pred(&b) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn huge_lambda_predicts_mean() {
        let x = vec![vec![1.0, 2.0], vec![3.0, -1.0], vec![0.5, 0.5], vec![2.0, 2.0]];
        let y = [1.0, 0.0, 0.0, 1.0];
        let (w, bias) = ridge_fit(&x, &y, 1e9).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-8));
        assert!((bias - 0.5).abs() < 1e-8);
    }

    #[test]
    fn rank_deficient_without_lambda_is_singular() {
        let x = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let y = [1.0, 2.0, 3.0];
        assert!(matches!(ridge_fit(&x, &y, 0.0), Err(Error::SingularSystem)));
        assert!(ridge_fit(&x, &y, 0.1).is_ok());
    }

    #[test]
    fn regressor_json_schema() {
        let r = Regressor {
            weights: [0.5; N_FEATURES],
            bias: -1.0,
            l2_lambda: 1.0,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["weights"].as_array().unwrap().len(), 9);
        assert_eq!(v["bias"], -1.0);
        assert_eq!(v["lambda"], 1.0);
        let back: Regressor = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn zero_weights_rank_chronologically() {
        let scored = vec![
            ScoredDate { candidate: cand("2020-01-03", 0, 1, 1), score: 0.3 },
            ScoredDate { candidate: cand("2020-01-01", 0, 1, 1), score: 0.3 },
            ScoredDate { candidate: cand("2020-01-02", 0, 1, 1), score: 0.3 },
        ];
        let ranked = rank_scored(scored);
        let dates: Vec<String> = ranked.iter().map(|s| s.candidate.date.to_string()).collect();
        assert_eq!(dates, ["2020-01-01", "2020-01-02", "2020-01-03"]);
    }

    #[test]
    fn pub_only_candidate_features() {
        use crate::corpus::{Article, Topic};
        let topic = Topic {
            name: "t".into(),
            articles: vec![Article {
                id: "a".into(),
                publish_date: "2020-01-01".parse().unwrap(),
                title: String::new(),
                sentences: vec![],
            }],
            queries: vec![],
            reference_timelines: vec![],
        };
        let c = cand("2020-01-01", 0, 1, 0);
        let f = date_features(&c, &topic).unwrap().0;
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], 2f64.ln());
        // single publication date: duration 0
        assert_eq!((f[7], f[8]), (0.0, 0.0));
    }
}
