//! News collection data model: topics, articles, sentences and timelines,
//! plus the text processing and TF-IDF vectors shared by every other module.

mod load;
mod text;
mod vector;

use std::collections::{BTreeMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::temporal::DateMention;

pub use load::{load_dataset, load_topic, read_timelines, write_timelines, write_topic};
pub use text::{sentence_split, tokenize};
pub use vector::{build_vectorizer, SparseVector, Vectorizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub article_id: String,
    /// Position within the article, starting at 0.
    pub index: usize,
    pub raw: String,
    pub tokens: Vec<String>,
    pub mentions: Vec<DateMention>,
}

impl Sentence {
    pub fn mentions_date(&self, date: NaiveDate) -> bool {
        self.mentions.iter().any(|m| m.resolved == date)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub publish_date: NaiveDate,
    pub title: String,
    pub sentences: Vec<Sentence>,
}

impl Article {
    /// Builds an article from plain text: sentence split, tokenized and
    /// annotated with date mentions anchored at `publish_date`.
    pub fn from_text(
        id: impl Into<String>,
        publish_date: NaiveDate,
        title: impl Into<String>,
        text: &str,
    ) -> Self {
        let id = id.into();
        Article {
            sentences: load::make_sentences(&id, text, None, publish_date),
            id,
            publish_date,
            title: title.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub name: String,
    pub articles: Vec<Article>,
    /// Query phrases associated with the topic.
    pub queries: Vec<String>,
    pub reference_timelines: Vec<Timeline>,
}

impl Topic {
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.articles.iter().flat_map(|a| a.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.articles.iter().map(|a| a.sentences.len()).sum()
    }

    /// Earliest and latest publication dates.
    ///
    /// # Panics
    ///
    /// Panics if the topic has no articles.
    pub fn publication_range(&self) -> (NaiveDate, NaiveDate) {
        let mut dates = self.articles.iter().map(|a| a.publish_date);
        let first = dates.next().expect("topic has at least one article");
        dates.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    /// Days between the earliest and the latest publication date.
    pub fn duration_days(&self) -> i64 {
        let (lo, hi) = self.publication_range();
        (hi - lo).num_days()
    }

    pub fn article(&self, id: &str) -> Option<&Article> {
        self.articles.iter().find(|a| a.id == id)
    }

    /// Keeps only sentences containing at least one token of the query
    /// phrases. Returns an unchanged copy when the topic has no queries.
    pub fn filter_by_queries(&self) -> Topic {
        let query_tokens: HashSet<String> =
            self.queries.iter().flat_map(|q| tokenize(q)).collect();
        if query_tokens.is_empty() {
            return self.clone();
        }
        let articles = self
            .articles
            .iter()
            .map(|a| Article {
                sentences: a
                    .sentences
                    .iter()
                    .filter(|s| s.tokens.iter().any(|t| query_tokens.contains(t)))
                    .cloned()
                    .collect(),
                ..a.clone()
            })
            .collect();
        Topic {
            articles,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub date: NaiveDate,
    pub summary: Vec<String>,
}

/// Dated daily summaries, strictly ascending by date with no empty entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Timeline {
    pub name: String,
    entries: Vec<TimelineEntry>,
}

impl Timeline {
    /// Sorts entries by date, concatenates the summaries of duplicate dates
    /// and drops entries without sentences.
    pub fn from_entries(name: impl Into<String>, entries: Vec<TimelineEntry>) -> Self {
        let mut by_date: BTreeMap<NaiveDate, Vec<String>> = BTreeMap::new();
        for e in entries {
            by_date.entry(e.date).or_default().extend(e.summary);
        }
        let entries = by_date
            .into_iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(date, summary)| TimelineEntry { date, summary })
            .collect();
        Timeline {
            name: name.into(),
            entries,
        }
    }

    pub fn entries(&self) -> &[TimelineEntry] {
        &self.entries
    }

    /// Timeline length `l`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.entries.iter().map(|e| e.date).collect()
    }

    /// Total number of summary sentences `N`.
    pub fn sentence_count(&self) -> usize {
        self.entries.iter().map(|e| e.summary.len()).sum()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}
