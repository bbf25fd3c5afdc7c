//! Timeline evaluation metrics and dataset statistics.

mod metrics;
mod stats;

pub use metrics::{
    align_dates, align_rouge_f1, date_f1, evaluate_pair, rouge_n, Alignment, EvalReport, PairScores,
    Prf, ScoreSet,
};
pub use stats::{dataset_stats, StatsReport};
