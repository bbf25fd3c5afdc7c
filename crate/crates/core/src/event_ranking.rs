//! Event detection by Markov clustering of an article-similarity graph,
//! and event scoring by how often the event date is mentioned.

use std::collections::{BTreeMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{build_vectorizer, tokenize, SparseVector, Topic, Vectorizer};
use crate::error::{Error, Result};
use crate::temporal::mention_window;

/// Number of leading sentences that, with the title, represent an article.
pub const LEAD_SENTENCES: usize = 5;

pub const DEFAULT_GRAPH_THRESHOLD: f64 = 0.1;

/// Undirected weighted graph over articles, stored as sorted adjacency
/// rows. Every node carries a self-loop of weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl SimilarityGraph {
    /// Builds a graph from explicit undirected edges. Self-loops are added.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adjacency: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, 1.0)]).collect();
        for &(i, j, w) in edges {
            if i != j && w > 0.0 {
                adjacency[i].push((j, w));
                adjacency[j].push((i, w));
            }
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
            row.dedup_by_key(|&mut (j, _)| j);
        }
        SimilarityGraph { adjacency }
    }

    /// Connects every pair whose cosine similarity is positive and at least
    /// `threshold`. Uses an inverted index so only pairs sharing a term are
    /// ever compared.
    pub fn from_vectors(vectors: &[SparseVector], threshold: f64) -> Self {
        let n = vectors.len();
        let unit: Vec<SparseVector> = vectors.iter().map(SparseVector::normalized).collect();
        let mut postings: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        let mut acc = vec![0.0f64; n];
        let mut touched = Vec::new();
        let mut edges = Vec::new();
        for (i, v) in unit.iter().enumerate() {
            for &(term, w) in v.entries() {
                if let Some(list) = postings.get(&term) {
                    for &(j, wj) in list {
                        if acc[j] == 0.0 {
                            touched.push(j);
                        }
                        acc[j] += w * wj;
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let sim = acc[j].min(1.0);
                if sim > 0.0 && sim >= threshold {
                    edges.push((j, i, sim));
                }
                acc[j] = 0.0;
            }
            touched.clear();
            for &(term, w) in v.entries() {
                postings.entry(term).or_default().push((i, w));
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|p| self.adjacency[i][p].1)
            .unwrap_or(0.0)
    }
}

/// Tokens of an article's title followed by its first few sentences.
pub fn article_tokens(topic: &Topic, index: usize) -> Vec<String> {
    let a = &topic.articles[index];
    let mut tokens = tokenize(&a.title);
    for s in a.sentences.iter().take(LEAD_SENTENCES) {
        tokens.extend(s.tokens.iter().cloned());
    }
    tokens
}

pub fn article_vectors(topic: &Topic, vectorizer: &Vectorizer) -> Vec<SparseVector> {
    (0..topic.articles.len())
        .map(|i| vectorizer.vectorize(&article_tokens(topic, i)))
        .collect()
}

/// Article-similarity graph over TF-IDF vectors of title and lead sentences.
pub fn build_similarity_graph(topic: &Topic, threshold: f64) -> Result<SimilarityGraph> {
    if topic.articles.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vectorizer = build_vectorizer(topic)?;
    Ok(SimilarityGraph::from_vectors(&article_vectors(topic, &vectorizer), threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MclParams {
    pub expansion: u32,
    pub inflation: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub prune: f64,
}

impl Default for MclParams {
    fn default() -> Self {
        MclParams {
            expansion: 2,
            inflation: 2.0,
            max_iter: 100,
            eps: 1e-6,
            prune: 1e-5,
        }
    }
}

/// Column-stochastic sparse matrix driven by MCL iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMatrix {
    /// Column-major; each column sorted by row.
    cols: Vec<Vec<(usize, f64)>>,
}

fn normalize_column(col: &mut [(usize, f64)]) {
    let sum: f64 = col.iter().map(|(_, v)| v).sum();
    if sum > 0.0 {
        for (_, v) in col.iter_mut() {
            *v /= sum;
        }
    }
}

impl MarkovMatrix {
    pub fn from_graph(g: &SimilarityGraph) -> Self {
        // symmetric adjacency: row i is also column i
        let mut cols = g.adjacency.clone();
        for col in &mut cols {
            normalize_column(col);
        }
        MarkovMatrix { cols }
    }

    pub fn size(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cols[col]
            .binary_search_by_key(&row, |&(r, _)| r)
            .map(|p| self.cols[col][p].1)
            .unwrap_or(0.0)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.cols.iter().map(|c| c.iter().map(|(_, v)| v).sum()).collect()
    }

    fn multiply(&self, other: &MarkovMatrix) -> MarkovMatrix {
        let n = self.size();
        let mut acc = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let cols = other
            .cols
            .iter()
            .map(|col_j| {
                for &(k, b) in col_j {
                    for &(i, a) in &self.cols[k] {
                        if acc[i] == 0.0 {
                            touched.push(i);
                        }
                        acc[i] += a * b;
                    }
                }
                touched.sort_unstable();
                let out: Vec<(usize, f64)> = touched
                    .iter()
                    .map(|&i| (i, std::mem::take(&mut acc[i])))
                    .filter(|&(_, v)| v > 0.0)
                    .collect();
                touched.clear();
                out
            })
            .collect();
        MarkovMatrix { cols }
    }

    /// One expansion + inflation round. Returns the largest absolute entry
    /// change.
    ///
    /// Pruning happens on the normalized inflated matrix (dropping entries
    /// below `prune` but always keeping each column's maximum) followed by
    /// a final renormalization, so every column stays stochastic.
    pub fn step(&mut self, p: &MclParams) -> f64 {
        let mut next = self.clone();
        for _ in 1..p.expansion {
            next = next.multiply(self);
        }
        for col in &mut next.cols {
            for (_, v) in col.iter_mut() {
                *v = v.powf(p.inflation);
            }
            normalize_column(col);
            let max = col.iter().map(|&(_, v)| v).fold(0.0, f64::max);
            col.retain(|&(_, v)| v >= p.prune || v == max);
            normalize_column(col);
        }
        let change = max_abs_difference(&self.cols, &next.cols);
        *self = next;
        change
    }

    /// Attractor rows (positive diagonal) claim the columns where they are
    /// positive; overlapping claims merge. Columns without any attractor
    /// support join the rows they do have.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut uf = UnionFind::new(n);
        let attractor: Vec<bool> = (0..n).map(|i| self.get(i, i) > 0.0).collect();
        for (j, col) in self.cols.iter().enumerate() {
            let claimed = col.iter().any(|&(i, v)| v > 0.0 && attractor[i]);
            for &(i, v) in col {
                if v > 0.0 && (attractor[i] || !claimed) {
                    uf.union(i, j);
                }
            }
        }
        uf.groups()
    }
}

fn max_abs_difference(a: &[Vec<(usize, f64)>], b: &[Vec<(usize, f64)>]) -> f64 {
    let mut max = 0.0f64;
    for (ca, cb) in a.iter().zip(b) {
        let (mut i, mut j) = (0, 0);
        while i < ca.len() || j < cb.len() {
            let (ra, va) = ca.get(i).copied().unwrap_or((usize::MAX, 0.0));
            let (rb, vb) = cb.get(j).copied().unwrap_or((usize::MAX, 0.0));
            let diff = if ra == rb {
                i += 1;
                j += 1;
                va - vb
            } else if ra < rb {
                i += 1;
                va
            } else {
                j += 1;
                vb
            };
            max = max.max(diff.abs());
        }
    }
    max
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeping group labels canonical
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    /// Groups ordered by smallest member, members ascending.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MclOutcome {
    /// Node sets partitioning the graph, ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    pub iterations: usize,
    /// False when `max_iter` was reached first.
    pub converged: bool,
}

/// Markov clustering.
///
/// # Panics
///
/// Panics if `expansion < 2` or `inflation <= 1`.
pub fn markov_cluster(g: &SimilarityGraph, p: &MclParams) -> MclOutcome {
    assert!(p.expansion >= 2, "expansion must be at least 2");
    assert!(p.inflation > 1.0, "inflation must exceed 1");
    let mut m = MarkovMatrix::from_graph(g);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < p.max_iter {
        let change = m.step(p);
        iterations += 1;
        if change < p.eps {
            converged = true;
            break;
        }
    }
    MclOutcome {
        clusters: m.clusters(),
        iterations,
        converged,
    }
}

/// Date with the most occurrences among the cluster's mentions and
/// publication dates; ties go to the earlier date.
///
/// # Panics
///
/// Panics if `cluster_nodes` is empty.
pub fn assign_event_date(cluster_nodes: &[usize], topic: &Topic) -> NaiveDate {
    let (lo, hi) = mention_window(topic);
    let mut counts: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for &i in cluster_nodes {
        let a = &topic.articles[i];
        *counts.entry(a.publish_date).or_default() += 1;
        for s in &a.sentences {
            for m in &s.mentions {
                if m.resolved >= lo && m.resolved <= hi {
                    *counts.entry(m.resolved).or_default() += 1;
                }
            }
        }
    }
    let mut best: Option<(NaiveDate, usize)> = None;
    for (d, c) in counts {
        if best.map_or(true, |(_, bc)| c > bc) {
            best = Some((d, c));
        }
    }
    best.expect("cluster must be non-empty").0
}

fn count_mentions<'a>(articles: impl Iterator<Item = &'a crate::corpus::Article>, date: NaiveDate) -> usize {
    articles
        .flat_map(|a| a.sentences.iter())
        .flat_map(|s| s.mentions.iter())
        .filter(|m| m.resolved == date)
        .count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventCluster {
    /// Sorted article ids.
    pub article_ids: Vec<String>,
    pub event_date: NaiveDate,
    /// Mentions of `event_date` within the cluster's own articles.
    pub mention_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventDetection {
    pub events: Vec<EventCluster>,
    pub iterations: usize,
    pub converged: bool,
}

/// Clusters the topic's articles and dates each cluster.
pub fn detect_events(topic: &Topic, threshold: f64, mcl: &MclParams) -> Result<EventDetection> {
    let graph = build_similarity_graph(topic, threshold)?;
    let outcome = markov_cluster(&graph, mcl);
    let mut events: Vec<EventCluster> = outcome
        .clusters
        .iter()
        .map(|nodes| {
            let event_date = assign_event_date(nodes, topic);
            let mention_count =
                count_mentions(nodes.iter().map(|&i| &topic.articles[i]), event_date);
            let mut article_ids: Vec<String> =
                nodes.iter().map(|&i| topic.articles[i].id.clone()).collect();
            article_ids.sort();
            EventCluster {
                article_ids,
                event_date,
                mention_count,
            }
        })
        .collect();
    events.sort_by(|a, b| a.article_ids[0].cmp(&b.article_ids[0]));
    Ok(EventDetection {
        events,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

/// How an event's date is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventScoring {
    /// Mentions of the event date inside the cluster's own articles.
    ClusterMentions,
    /// Mentions of the event date anywhere in the collection.
    CollectionMentions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredEvent {
    pub cluster: EventCluster,
    pub score: f64,
}

/// Row of the optional cluster dump file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDumpRow {
    pub event_date: NaiveDate,
    pub score: f64,
    pub article_ids: Vec<String>,
}

impl From<&ScoredEvent> for EventDumpRow {
    fn from(e: &ScoredEvent) -> Self {
        EventDumpRow {
            event_date: e.cluster.event_date,
            score: e.score,
            article_ids: e.cluster.article_ids.clone(),
        }
    }
}

/// Scores events and orders them by score, then earlier date, then larger
/// cluster, then smallest article id.
pub fn score_events(clusters: &[EventCluster], topic: &Topic, scoring: EventScoring) -> Vec<ScoredEvent> {
    let mut scored: Vec<ScoredEvent> = clusters
        .iter()
        .map(|c| {
            let score = match scoring {
                EventScoring::ClusterMentions => {
                    let ids: HashSet<&str> = c.article_ids.iter().map(String::as_str).collect();
                    count_mentions(
                        topic.articles.iter().filter(|a| ids.contains(a.id.as_str())),
                        c.event_date,
                    )
                }
                EventScoring::CollectionMentions => count_mentions(topic.articles.iter(), c.event_date),
            };
            ScoredEvent {
                cluster: c.clone(),
                score: score as f64,
            }
        })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.cluster.event_date.cmp(&b.cluster.event_date))
            .then(b.cluster.article_ids.len().cmp(&a.cluster.article_ids.len()))
            .then(a.cluster.article_ids.cmp(&b.cluster.article_ids))
    });
    scored
}

/// Collapses ranked events sharing a date into the best-ranked one, merging
/// their articles and mention counts, so every remaining event has a
/// distinct date.
pub fn dedupe_by_date(ranked: Vec<ScoredEvent>) -> Vec<ScoredEvent> {
    let mut out: Vec<ScoredEvent> = Vec::with_capacity(ranked.len());
    for ev in ranked {
        match out.iter_mut().find(|e| e.cluster.event_date == ev.cluster.event_date) {
            Some(existing) => {
                existing.cluster.article_ids.extend(ev.cluster.article_ids);
                existing.cluster.article_ids.sort();
                existing.cluster.mention_count += ev.cluster.mention_count;
            }
            None => out.push(ev),
        }
    }
    out
}
