//! Extractive daily summaries built around TF-IDF centroids.

use std::collections::HashSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, SparseVector, Timeline, TimelineEntry, Topic, Vectorizer};
use crate::error::{Error, Result};
use crate::event_ranking::EventCluster;

/// Candidates at or above this cosine to an already chosen sentence are
/// skipped by [`centroid_rank`].
pub const REDUNDANCY_THRESHOLD: f64 = 0.8;

/// How many sentences each daily summary gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KPolicy {
    /// Average daily-summary length of the reference timelines.
    Expert,
    /// One sentence per date.
    One,
    Fixed(usize),
}

impl KPolicy {
    /// Resolves to a concrete `k >= 1`. `Expert` uses the pooled average
    /// (total sentences / total entries) of `references`, rounded.
    pub fn resolve<'a>(&self, references: impl IntoIterator<Item = &'a Timeline>) -> usize {
        match *self {
            KPolicy::One => 1,
            KPolicy::Fixed(k) => k.max(1),
            KPolicy::Expert => {
                let (mut sentences, mut entries) = (0usize, 0usize);
                for tl in references {
                    sentences += tl.sentence_count();
                    entries += tl.len();
                }
                if entries == 0 {
                    return 1;
                }
                ((sentences as f64 / entries as f64).round() as usize).max(1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummaryMethod {
    /// Rank by similarity to the centroid, skipping near-duplicates.
    Rank,
    /// Greedy set optimization of the summary centroid (CENTROID-OPT).
    Opt,
}

/// Sentences from articles published on `date` plus sentences mentioning
/// it, ordered by (article id, index). Sentences without tokens are left
/// out since they cannot be compared.
pub fn candidate_sentences(topic: &Topic, date: NaiveDate) -> Vec<&Sentence> {
    let mut out: Vec<&Sentence> = topic
        .articles
        .iter()
        .flat_map(|a| {
            let published = a.publish_date == date;
            a.sentences
                .iter()
                .filter(move |s| published || s.mentions_date(date))
        })
        .filter(|s| !s.tokens.is_empty())
        .collect();
    sort_stable(&mut out);
    out
}

fn sort_stable(sentences: &mut Vec<&Sentence>) {
    sentences.sort_by(|a, b| a.article_id.cmp(&b.article_id).then(a.index.cmp(&b.index)));
    sentences.dedup_by(|a, b| a.article_id == b.article_id && a.index == b.index);
}

/// Candidates for an event: every sentence of the cluster's articles, plus
/// (unless `restrict`) sentences elsewhere that mention the event date.
pub fn event_candidate_sentences<'t>(
    topic: &'t Topic,
    cluster: &EventCluster,
    restrict: bool,
) -> Vec<&'t Sentence> {
    let ids: HashSet<&str> = cluster.article_ids.iter().map(String::as_str).collect();
    let mut out: Vec<&Sentence> = topic
        .articles
        .iter()
        .flat_map(|a| {
            let member = ids.contains(a.id.as_str());
            a.sentences
                .iter()
                .filter(move |s| member || (!restrict && s.mentions_date(cluster.event_date)))
        })
        .filter(|s| !s.tokens.is_empty())
        .collect();
    sort_stable(&mut out);
    out
}

fn vectors(cands: &[&Sentence], vec: &Vectorizer) -> Vec<SparseVector> {
    cands.iter().map(|s| vec.vectorize(&s.tokens)).collect()
}

/// Up to `k` sentences ranked by cosine to the candidates' centroid.
pub fn centroid_rank<'a>(cands: &[&'a Sentence], vec: &Vectorizer, k: usize) -> Vec<&'a Sentence> {
    let vs = vectors(cands, vec);
    let centroid = SparseVector::centroid(&vs);
    let mut order: Vec<(usize, f64)> = vs.iter().map(|v| v.dot(&centroid)).enumerate().collect();
    // sort_by is stable, so equal scores keep candidate order
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in order {
        if chosen.len() == k {
            break;
        }
        if chosen.iter().any(|&j| vs[i].cosine(&vs[j]) >= REDUNDANCY_THRESHOLD) {
            continue;
        }
        chosen.push(i);
    }
    chosen.into_iter().map(|i| cands[i]).collect()
}

/// Objective of [`centroid_opt`]: cosine between the normalized sum of the
/// chosen sentence vectors and the candidate centroid.
pub fn centroid_objective(chosen: &[&SparseVector], centroid: &SparseVector) -> f64 {
    let sum = chosen
        .iter()
        .fold(SparseVector::default(), |acc, v| acc.add(v));
    sum.normalized().dot(centroid)
}

/// Greedy CENTROID-OPT: repeatedly adds the candidate that maximizes
/// [`centroid_objective`], stopping at `k` or when nothing improves it.
/// The first pick is always made when candidates exist.
pub fn centroid_opt<'a>(cands: &[&'a Sentence], vec: &Vectorizer, k: usize) -> Vec<&'a Sentence> {
    let vs = vectors(cands, vec);
    let centroid = SparseVector::centroid(&vs);
    let mut chosen: Vec<usize> = Vec::new();
    let mut sum = SparseVector::default();
    let mut current = f64::NEG_INFINITY;
    while chosen.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in vs.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let value = sum.add(v).normalized().dot(&centroid);
            if best.map_or(true, |(_, bv)| value > bv) {
                best = Some((i, value));
            }
        }
        match best {
            Some((i, value)) if value > current => {
                sum = sum.add(&vs[i]);
                current = value;
                chosen.push(i);
            }
            _ => break,
        }
    }
    chosen.into_iter().map(|i| cands[i]).collect()
}

pub fn summarize<'a>(
    method: SummaryMethod,
    cands: &[&'a Sentence],
    vec: &Vectorizer,
    k: usize,
) -> Vec<&'a Sentence> {
    match method {
        SummaryMethod::Rank => centroid_rank(cands, vec, k),
        SummaryMethod::Opt => centroid_opt(cands, vec, k),
    }
}

/// A date picked for the timeline, optionally backed by an event cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedDate {
    pub date: NaiveDate,
    pub event: Option<EventCluster>,
}

impl SelectedDate {
    pub fn plain(date: NaiveDate) -> Self {
        SelectedDate { date, event: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineOptions {
    pub k: usize,
    pub method: SummaryMethod,
    /// Event candidates come only from the cluster's own articles.
    pub restrict_events: bool,
}

/// Summarizes every selected date. Dates without candidates are dropped;
/// entries come out in date order.
pub fn build_timeline(
    name: &str,
    topic: &Topic,
    selected: &[SelectedDate],
    options: &TimelineOptions,
    vec: &Vectorizer,
) -> Result<Timeline> {
    let entries = selected
        .iter()
        .filter_map(|sel| {
            let cands = match &sel.event {
                Some(ev) => event_candidate_sentences(topic, ev, options.restrict_events),
                None => candidate_sentences(topic, sel.date),
            };
            let picked = summarize(options.method, &cands, vec, options.k);
            (!picked.is_empty()).then(|| TimelineEntry {
                date: sel.date,
                summary: picked.into_iter().map(|s| s.raw.clone()).collect(),
            })
        })
        .collect::<Vec<_>>();
    if entries.is_empty() {
        return Err(Error::EmptyTimeline);
    }
    Ok(Timeline::from_entries(name, entries))
}
