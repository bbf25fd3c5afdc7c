//! End-to-end timeline generation for one topic.
//!
//! | method | items | scoring | summarizer |
//! |--------|-------|---------|------------|
//! | `datewise` | dates | regressor | centroid-opt |
//! | `adprm-d` | dates | regressor | centroid-rank |
//! | `clust` | MCL events | date mentions in the collection | centroid-opt |
//! | `adprm-e` | MCL events | date mentions in the cluster | centroid-rank |
//!
//! Under the `base` constraint the timeline length and daily summary
//! length come from the paired reference timeline; under `adaptive` the
//! length is the knee of the selection-confidence curve.

use serde::{Deserialize, Serialize};

use crate::corpus::{build_vectorizer, Timeline, Topic};
use crate::date_ranking::{score_dates, Regressor, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::event_ranking::{
    dedupe_by_date, detect_events, score_events, EventCluster, EventScoring, MclParams,
    DEFAULT_GRAPH_THRESHOLD,
};
use crate::selection::{choose_length, LengthChoice, SelectionParams, SortedScores};
use crate::summarizer::{build_timeline, KPolicy, SelectedDate, SummaryMethod, TimelineOptions};

use chrono::NaiveDate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Datewise,
    Clust,
    #[serde(rename = "adprm-d")]
    AdprmD,
    #[serde(rename = "adprm-e")]
    AdprmE,
}

impl Method {
    pub fn default_summarizer(self) -> SummaryMethod {
        match self {
            Method::Datewise | Method::Clust => SummaryMethod::Opt,
            Method::AdprmD | Method::AdprmE => SummaryMethod::Rank,
        }
    }

    pub fn needs_regressor(self) -> bool {
        matches!(self, Method::Datewise | Method::AdprmD)
    }

    pub fn is_adaptive_capable(self) -> bool {
        matches!(self, Method::AdprmD | Method::AdprmE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Length and k taken from the reference timeline.
    Base,
    /// Length chosen at the knee of the selection-confidence curve.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub method: Method,
    pub constraint: Constraint,
    pub k_policy: KPolicy,
    /// Overrides the method's default summarizer.
    pub summarizer: Option<SummaryMethod>,
    pub selection: SelectionParams,
    pub mcl: MclParams,
    pub graph_threshold: f64,
    pub lambda: f64,
    /// Event summaries use only the cluster's own articles.
    pub restrict_events: bool,
    /// Keep only sentences sharing a token with the topic's queries.
    pub query_filter: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            method: Method::AdprmD,
            constraint: Constraint::Adaptive,
            k_policy: KPolicy::One,
            summarizer: None,
            selection: SelectionParams::default(),
            mcl: MclParams::default(),
            graph_threshold: DEFAULT_GRAPH_THRESHOLD,
            lambda: DEFAULT_LAMBDA,
            restrict_events: false,
            query_filter: false,
        }
    }
}

impl PipelineConfig {
    /// Rejects combinations that do not correspond to a defined setup:
    /// the baselines only run under `base`, and `base` always uses the
    /// expert k.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.constraint == Constraint::Adaptive && !self.method.is_adaptive_capable() {
            return bad("adaptive constraint requires method adprm-d or adprm-e");
        }
        if self.constraint == Constraint::Base && self.k_policy != KPolicy::Expert {
            return bad("base constraint uses the expert k policy");
        }
        if !(0.0..1.0).contains(&self.graph_threshold) {
            return bad("graph threshold must be in [0, 1)");
        }
        if self.selection.alpha <= 0.0 {
            return bad("alpha must be positive");
        }
        if self.mcl.expansion < 2 || self.mcl.inflation <= 1.0 {
            return bad("mcl needs expansion >= 2 and inflation > 1");
        }
        if self.lambda < 0.0 {
            return bad("lambda must be non-negative");
        }
        Ok(())
    }

    pub fn summary_method(&self) -> SummaryMethod {
        self.summarizer.unwrap_or(self.method.default_summarizer())
    }
}

/// A scored date or event, best first in a [`Ranking`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankedItem {
    pub date: NaiveDate,
    pub score: f64,
    pub event: Option<EventCluster>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub items: Vec<RankedItem>,
    /// MCL convergence, for event methods.
    pub mcl_converged: Option<bool>,
}

impl Ranking {
    pub fn scores(&self) -> SortedScores {
        SortedScores::from_unsorted(self.items.iter().map(|i| i.score).collect())
    }

    pub fn top_dates(&self, c: usize) -> Vec<NaiveDate> {
        self.items.iter().take(c).map(|i| i.date).collect()
    }
}

pub fn prepare_topic(topic: &Topic, config: &PipelineConfig) -> Topic {
    if config.query_filter {
        topic.filter_by_queries()
    } else {
        topic.clone()
    }
}

/// Scores the topic's dates or events according to the method.
pub fn rank_items(topic: &Topic, config: &PipelineConfig, regressor: Option<&Regressor>) -> Result<Ranking> {
    match config.method {
        Method::Datewise | Method::AdprmD => {
            let r = regressor.ok_or_else(|| {
                Error::InvalidConfig("method needs a trained regressor".to_string())
            })?;
            let items = score_dates(r, topic)?
                .into_iter()
                .map(|s| RankedItem {
                    date: s.candidate.date,
                    score: s.score,
                    event: None,
                })
                .collect();
            Ok(Ranking {
                items,
                mcl_converged: None,
            })
        }
        Method::Clust | Method::AdprmE => {
            let detection = detect_events(topic, config.graph_threshold, &config.mcl)?;
            let scoring = if config.method == Method::Clust {
                EventScoring::CollectionMentions
            } else {
                EventScoring::ClusterMentions
            };
            let ranked = dedupe_by_date(score_events(&detection.events, topic, scoring));
            let items = ranked
                .into_iter()
                .map(|e| RankedItem {
                    date: e.cluster.event_date,
                    score: e.score,
                    event: Some(e.cluster),
                })
                .collect();
            Ok(Ranking {
                items,
                mcl_converged: Some(detection.converged),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicRun {
    pub timeline: Timeline,
    /// Number of dates requested before empty dates were dropped.
    pub requested_length: usize,
    pub k: usize,
    pub candidates: usize,
    /// Present under the adaptive constraint.
    pub choice: Option<LengthChoice>,
    pub mcl_converged: Option<bool>,
    pub ranking: Ranking,
}

/// Generates a timeline for `topic`. `reference` is required under the
/// base constraint and names the output; adaptive runs ignore its length.
pub fn run_topic(
    topic: &Topic,
    config: &PipelineConfig,
    regressor: Option<&Regressor>,
    reference: Option<&Timeline>,
) -> Result<TopicRun> {
    config.validate()?;
    let topic = prepare_topic(topic, config);
    let ranking = rank_items(&topic, config, regressor)?;
    if ranking.items.is_empty() {
        return Err(Error::EmptyTimeline);
    }
    let (length, k, choice) = match config.constraint {
        Constraint::Base => {
            let reference = reference.ok_or_else(|| {
                Error::InvalidConfig("base constraint needs a reference timeline".to_string())
            })?;
            (reference.len(), config.k_policy.resolve([reference]), None)
        }
        Constraint::Adaptive => {
            let choice = choose_length(&ranking.scores(), &config.selection)?;
            let k = config.k_policy.resolve(&topic.reference_timelines);
            (choice.length, k, Some(choice))
        }
    };
    let selected: Vec<SelectedDate> = ranking
        .items
        .iter()
        .take(length)
        .map(|item| SelectedDate {
            date: item.date,
            event: item.event.clone(),
        })
        .collect();
    let vectorizer = build_vectorizer(&topic)?;
    let options = TimelineOptions {
        k,
        method: config.summary_method(),
        restrict_events: config.restrict_events,
    };
    let name = reference.map_or("generated", |r| r.name.as_str());
    let timeline = build_timeline(name, &topic, &selected, &options, &vectorizer)?;
    Ok(TopicRun {
        timeline,
        requested_length: length,
        k,
        candidates: ranking.items.len(),
        choice,
        mcl_converged: ranking.mcl_converged,
        ranking,
    })
}
