use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Timeline};
use crate::error::{Error, Result};

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }

    fn mean(items: &[Prf]) -> Prf {
        let n = items.len().max(1) as f64;
        Prf {
            precision: items.iter().map(|p| p.precision).sum::<f64>() / n,
            recall: items.iter().map(|p| p.recall).sum::<f64>() / n,
            f1: items.iter().map(|p| p.f1).sum::<f64>() / n,
        }
    }
}

/// Exact-match F1 over the two date sets.
pub fn date_f1(pred: &Timeline, reference: &Timeline) -> Result<Prf> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    if pred.is_empty() {
        return Ok(Prf::new(0.0, 0.0));
    }
    let p: HashSet<NaiveDate> = pred.dates().into_iter().collect();
    let r: HashSet<NaiveDate> = reference.dates().into_iter().collect();
    let hits = p.intersection(&r).count() as f64;
    Ok(Prf::new(hits / p.len() as f64, hits / r.len() as f64))
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for w in tokens.windows(n) {
        *counts
            .entry(w.iter().map(AsRef::as_ref).collect())
            .or_insert(0) += 1;
    }
    counts
}

/// ROUGE-N with clipped n-gram counts. No n-grams on either side gives
/// zeros.
pub fn rouge_n<S: AsRef<str>, T: AsRef<str>>(pred_tokens: &[S], ref_tokens: &[T], n: usize) -> Prf {
    let p = ngram_counts(pred_tokens, n);
    let r = ngram_counts(ref_tokens, n);
    let total_p: usize = p.values().sum();
    let total_r: usize = r.values().sum();
    if total_p == 0 || total_r == 0 {
        return Prf::new(0.0, 0.0);
    }
    let overlap: usize = p
        .iter()
        .map(|(g, &c)| r.get(g).map_or(0, |&rc| c.min(rc)))
        .sum();
    Prf::new(overlap as f64 / total_p as f64, overlap as f64 / total_r as f64)
}

fn gamma(a: NaiveDate, b: NaiveDate) -> f64 {
    1.0 / (1.0 + (a - b).num_days().abs() as f64)
}

fn entry_tokens(tl: &Timeline) -> Vec<Vec<String>> {
    tl.entries()
        .iter()
        .map(|e| e.summary.iter().flat_map(|s| tokenize(s)).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub pred_date: NaiveDate,
    pub ref_date: NaiveDate,
    pub gamma: f64,
}

fn align_indices(pred: &Timeline, reference: &Timeline, pt: &[Vec<String>], rt: &[Vec<String>]) -> Vec<usize> {
    let pe = pred.entries();
    let re = reference.entries();
    pe.iter()
        .enumerate()
        .map(|(i, p)| {
            let mut best = 0;
            let mut best_key = (f64::NEG_INFINITY, i64::MIN);
            for (j, r) in re.iter().enumerate() {
                let score = rouge_n(&pt[i], &rt[j], 1).f1 * gamma(p.date, r.date);
                let key = (score, -(p.date - r.date).num_days().abs());
                // strict comparison keeps the earlier reference date on full ties
                if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
                    best = j;
                    best_key = key;
                }
            }
            best
        })
        .collect()
}

/// Many-to-one alignment of predicted dates to reference dates, maximizing
/// `ROUGE-1 F1 × γ` with `γ = 1 / (1 + |Δdays|)`. Ties go to the nearest,
/// then the earlier, reference date.
pub fn align_dates(pred: &Timeline, reference: &Timeline) -> Result<Vec<Alignment>> {
    if pred.is_empty() || reference.is_empty() {
        return Err(Error::EmptyTimeline);
    }
    let (pt, rt) = (entry_tokens(pred), entry_tokens(reference));
    Ok(align_indices(pred, reference, &pt, &rt)
        .into_iter()
        .zip(pred.entries())
        .map(|(j, p)| {
            let r = reference.entries()[j].date;
            Alignment {
                pred_date: p.date,
                ref_date: r,
                gamma: gamma(p.date, r),
            }
        })
        .collect())
}

/// Alignment-based ROUGE-N.
///
/// Each predicted date contributes `ROUGE-N F1(pred day, aligned ref day) × γ`.
/// Precision averages contributions over predicted dates; recall averages,
/// over reference dates, the best contribution aligned to each (0 if none).
pub fn align_rouge_f1(pred: &Timeline, reference: &Timeline, n: usize) -> Result<Prf> {
    if pred.is_empty() || reference.is_empty() {
        return Err(Error::EmptyTimeline);
    }
    let (pt, rt) = (entry_tokens(pred), entry_tokens(reference));
    let aligned = align_indices(pred, reference, &pt, &rt);
    let mut best_for_ref = vec![0.0f64; reference.len()];
    let mut total = 0.0;
    for (i, &j) in aligned.iter().enumerate() {
        let g = gamma(pred.entries()[i].date, reference.entries()[j].date);
        let contribution = rouge_n(&pt[i], &rt[j], n).f1 * g;
        total += contribution;
        best_for_ref[j] = best_for_ref[j].max(contribution);
    }
    let precision = total / pred.len() as f64;
    let recall = best_for_ref.iter().sum::<f64>() / reference.len() as f64;
    Ok(Prf::new(precision, recall))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreSet {
    pub date_f1: Prf,
    pub ar1: Prf,
    pub ar2: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScores {
    pub topic: String,
    pub reference: String,
    #[serde(flatten)]
    pub scores: ScoreSet,
}

/// Date F1, AR-1 and AR-2 of one prediction against one reference. An
/// empty prediction scores zero everywhere.
pub fn evaluate_pair(pred: &Timeline, reference: &Timeline) -> Result<ScoreSet> {
    let date = date_f1(pred, reference)?;
    if pred.is_empty() {
        return Ok(ScoreSet {
            date_f1: date,
            ..Default::default()
        });
    }
    Ok(ScoreSet {
        date_f1: date,
        ar1: align_rouge_f1(pred, reference, 1)?,
        ar2: align_rouge_f1(pred, reference, 2)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub pairs: Vec<PairScores>,
    /// Arithmetic mean over pairs.
    pub macro_avg: ScoreSet,
}

impl EvalReport {
    pub fn new(label: impl Into<String>, pairs: Vec<PairScores>) -> Self {
        let pick = |f: fn(&ScoreSet) -> Prf| pairs.iter().map(|p| f(&p.scores)).collect::<Vec<_>>();
        let macro_avg = ScoreSet {
            date_f1: Prf::mean(&pick(|s| s.date_f1)),
            ar1: Prf::mean(&pick(|s| s.ar1)),
            ar2: Prf::mean(&pick(|s| s.ar2)),
        };
        EvalReport {
            label: label.into(),
            pairs,
            macro_avg,
        }
    }

    /// Plain-text table with the macro F1 scores in the AR1-F / AR2-F /
    /// DATE-F1 layout, followed by per-pair rows.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .pairs
            .iter()
            .map(|p| p.topic.len() + p.reference.len() + 1)
            .chain([self.label.len(), 7])
            .max()
            .unwrap_or(7);
        let _ = writeln!(out, "{:<width$} | {:>7} {:>7} {:>7}", "Method", "AR1-F", "AR2-F", "DATE-F1");
        let _ = writeln!(out, "{}", "-".repeat(width + 27));
        let m = &self.macro_avg;
        let _ = writeln!(
            out,
            "{:<width$} | {:>7.3} {:>7.3} {:>7.3}",
            self.label, m.ar1.f1, m.ar2.f1, m.date_f1.f1
        );
        let _ = writeln!(out, "{}", "-".repeat(width + 27));
        for p in &self.pairs {
            let s = &p.scores;
            let _ = writeln!(
                out,
                "{:<width$} | {:>7.3} {:>7.3} {:>7.3}",
                format!("{}/{}", p.topic, p.reference),
                s.ar1.f1,
                s.ar2.f1,
                s.date_f1.f1
            );
        }
        out
    }
}
