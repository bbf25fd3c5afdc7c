//! Timeline summarization over news collections with automatic selection
//! of the timeline length.
//!
//! Items (candidate dates or event clusters) are scored, the mean score of
//! the top-`c` items is turned into a selection-confidence curve, and the
//! timeline length is read off the knee of that curve. Selected dates are
//! then summarized extractively.
//!
//! Module map:
//!
//! * [`corpus`]: topics, articles, sentences, tokenization and TF-IDF.
//! * [`temporal`]: date-mention recognition and candidate dates.
//! * [`date_ranking`]: date features and the ridge regressor.
//! * [`event_ranking`]: similarity graph, Markov clustering, event scores.
//! * [`selection`]: selection confidence and Kneedle knee detection.
//! * [`summarizer`]: centroid-based daily summaries and timeline assembly.
//! * [`evaluation`]: Date F1, alignment-based ROUGE, dataset statistics.
//! * [`pipeline`]: the end-to-end methods (DATEWISE, CLUST, AdpRM-D, AdpRM-E).

pub mod corpus;
pub mod date_ranking;
pub mod error;
pub mod evaluation;
pub mod event_ranking;
pub mod pipeline;
pub mod selection;
pub mod summarizer;
pub mod synthetic;
pub mod temporal;

pub use chrono::NaiveDate;
pub use error::{Error, Result};
