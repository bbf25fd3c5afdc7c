use std::collections::HashSet;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::Topic;
use crate::error::{Error, Result};
use crate::temporal::candidate_dates;

/// Dataset statistics.
///
/// Sentence, document and duration averages are per topic; the remaining
/// averages are per reference timeline. Duration is
/// `last publication - first publication` in days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub topics: usize,
    pub tls: usize,
    pub avg_sent_num: f64,
    pub avg_docs_num: f64,
    pub avg_l: f64,
    pub avg_k: f64,
    pub avg_duration: f64,
    /// Mean of `L / duration` (duration floored at one day).
    pub avg_dur_comp: f64,
    /// Mean of `N / sentences in the collection`.
    pub avg_sent_comp: f64,
    /// Mean of `L / distinct published or mentioned dates`.
    pub avg_date_comp: f64,
    /// Mean fraction of reference dates published on or mentioned.
    pub avg_date_cov: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub fn dataset_stats(dataset: &[Topic]) -> Result<StatsReport> {
    let (mut sent, mut docs, mut dur) = (vec![], vec![], vec![]);
    let (mut l, mut k, mut dur_comp, mut sent_comp, mut date_comp, mut date_cov) =
        (vec![], vec![], vec![], vec![], vec![], vec![]);
    for topic in dataset {
        let sentences = topic.sentence_count();
        let duration = topic.duration_days();
        let dates: HashSet<NaiveDate> = candidate_dates(topic)?.into_iter().map(|c| c.date).collect();
        sent.push(sentences as f64);
        docs.push(topic.articles.len() as f64);
        dur.push(duration as f64);
        for tl in topic.reference_timelines.iter().filter(|t| !t.is_empty()) {
            let len = tl.len() as f64;
            let n = tl.sentence_count() as f64;
            l.push(len);
            k.push(n / len);
            dur_comp.push(len / duration.max(1) as f64);
            sent_comp.push(if sentences == 0 { 0.0 } else { n / sentences as f64 });
            date_comp.push(len / dates.len() as f64);
            let covered = tl.dates().iter().filter(|d| dates.contains(d)).count();
            date_cov.push(covered as f64 / len);
        }
    }
    if l.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(StatsReport {
        topics: dataset.len(),
        tls: l.len(),
        avg_sent_num: mean(&sent),
        avg_docs_num: mean(&docs),
        avg_l: mean(&l),
        avg_k: mean(&k),
        avg_duration: mean(&dur),
        avg_dur_comp: mean(&dur_comp),
        avg_sent_comp: mean(&sent_comp),
        avg_date_comp: mean(&date_comp),
        avg_date_cov: mean(&date_cov),
    })
}

impl StatsReport {
    /// One row per statistic, one column per named dataset.
    pub fn table(columns: &[(&str, &StatsReport)]) -> String {
        type Row = (&'static str, fn(&StatsReport) -> String);
        let rows: [Row; 11] = [
            ("Topics", |s| s.topics.to_string()),
            ("TLs", |s| s.tls.to_string()),
            ("AvgSentNum", |s| format!("{:.0}", s.avg_sent_num)),
            ("AvgDocsNum", |s| format!("{:.0}", s.avg_docs_num)),
            ("AvgL", |s| format!("{:.0}", s.avg_l)),
            ("AvgK", |s| format!("{:.1}", s.avg_k)),
            ("AvgDuration", |s| format!("{:.0}", s.avg_duration)),
            ("AvgDurComp", |s| format!("{:.4}", s.avg_dur_comp)),
            ("AvgSentComp", |s| format!("{:.4}", s.avg_sent_comp)),
            ("AvgDateComp", |s| format!("{:.2}", s.avg_date_comp)),
            ("AvgDateCov", |s| format!("{:.2}", s.avg_date_cov)),
        ];
        let mut out = String::new();
        let _ = write!(out, "{:<12}", "Dataset");
        for (name, _) in columns {
            let _ = write!(out, " | {:>10}", name);
        }
        out.push('\n');
        for (label, f) in rows {
            let _ = write!(out, "{label:<12}");
            for (_, s) in columns {
                let _ = write!(out, " | {:>10}", f(s));
            }
            out.push('\n');
        }
        out
    }
}
