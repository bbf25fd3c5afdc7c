//! Date-mention recognition and candidate-date enumeration.
//!
//! The built-in [`RuleRecognizer`] handles a small, deterministic subset of
//! temporal expressions. Resolution depends only on the text and the
//! anchor date (the containing article's publication date).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use chrono::{Datelike, Duration, NaiveDate};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Topic};
use crate::error::{Error, Result};

/// Mentions older than this many days before the first publication are
/// treated as noise.
pub const LOOKBACK_DAYS: i64 = 3650;

/// A partial date resolving further than this past the anchor is moved to
/// the previous year.
const PARTIAL_FORWARD_DAYS: i64 = 183;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MentionKind {
    Explicit,
    Relative,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateMention {
    pub resolved: NaiveDate,
    /// Byte range in the sentence text.
    pub span: (usize, usize),
    pub kind: MentionKind,
}

pub trait DateRecognizer {
    fn extract(&self, text: &str, anchor: NaiveDate) -> Vec<DateMention>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Iso,
    MonthDayYear,
    DayMonthYear,
    CjkFull,
    RelativeEn,
    RelativeCjk,
    MonthDay,
}

const MONTHS: &str = "january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec";

fn month_number(name: &str) -> Option<u32> {
    let lower = name.to_ascii_lowercase();
    let m = match lower.get(..3)? {
        "jan" => 1,
        "feb" => 2,
        "mar" => 3,
        "apr" => 4,
        "may" => 5,
        "jun" => 6,
        "jul" => 7,
        "aug" => 8,
        "sep" => 9,
        "oct" => 10,
        "nov" => 11,
        "dec" => 12,
        _ => return None,
    };
    Some(m)
}

/// Regex-based recognizer for ISO dates, English and Chinese full dates,
/// today/yesterday/tomorrow (and 今天/昨天/明天), and month-day dates.
///
/// Overlapping matches are resolved longest-first, with rule order as the
/// tie-break. Overlaps are settled before calendar validation, so
/// "February 30, 2020" yields nothing rather than a partial "February 30".
pub struct RuleRecognizer {
    rules: Vec<(Rule, Regex)>,
}

impl Default for RuleRecognizer {
    fn default() -> Self {
        let p = |s: String| Regex::new(&s).expect("valid date pattern");
        let rules = vec![
            (Rule::Iso, p(r"\b(\d{4})-(\d{2})-(\d{2})\b".to_string())),
            (
                Rule::MonthDayYear,
                p(format!(r"(?i)\b({MONTHS})\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?,?\s+(\d{{4}})\b")),
            ),
            (
                Rule::DayMonthYear,
                p(format!(r"(?i)\b(\d{{1,2}})(?:st|nd|rd|th)?\s+(?:of\s+)?({MONTHS})\.?,?\s+(\d{{4}})\b")),
            ),
            (
                Rule::CjkFull,
                p(r"(\d{4})\s*年\s*(\d{1,2})\s*月\s*(\d{1,2})\s*[日号]".to_string()),
            ),
            (Rule::RelativeEn, p(r"(?i)\b(today|yesterday|tomorrow)\b".to_string())),
            (Rule::RelativeCjk, p(r"(今天|昨天|明天)".to_string())),
            (
                Rule::MonthDay,
                p(format!(r"(?i)\b({MONTHS})\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?\b")),
            ),
        ];
        RuleRecognizer { rules }
    }
}

fn num(s: &str) -> Option<u32> {
    s.parse().ok()
}

impl RuleRecognizer {
    fn resolve(rule: Rule, caps: &regex::Captures<'_>, anchor: NaiveDate) -> Option<(NaiveDate, MentionKind)> {
        let g = |i: usize| caps.get(i).map(|m| m.as_str()).unwrap_or("");
        match rule {
            Rule::Iso | Rule::CjkFull => {
                let y = g(1).parse().ok()?;
                NaiveDate::from_ymd_opt(y, num(g(2))?, num(g(3))?).map(|d| (d, MentionKind::Explicit))
            }
            Rule::MonthDayYear => {
                let y = g(3).parse().ok()?;
                NaiveDate::from_ymd_opt(y, month_number(g(1))?, num(g(2))?).map(|d| (d, MentionKind::Explicit))
            }
            Rule::DayMonthYear => {
                let y = g(3).parse().ok()?;
                NaiveDate::from_ymd_opt(y, month_number(g(2))?, num(g(1))?).map(|d| (d, MentionKind::Explicit))
            }
            Rule::RelativeEn | Rule::RelativeCjk => {
                let offset = match g(1).to_ascii_lowercase().as_str() {
                    "today" | "今天" => 0,
                    "yesterday" | "昨天" => -1,
                    "tomorrow" | "明天" => 1,
                    _ => return None,
                };
                anchor
                    .checked_add_signed(Duration::days(offset))
                    .map(|d| (d, MentionKind::Relative))
            }
            Rule::MonthDay => {
                let (month, day) = (month_number(g(1))?, num(g(2))?);
                let mut date = NaiveDate::from_ymd_opt(anchor.year(), month, day)?;
                if (date - anchor).num_days() > PARTIAL_FORWARD_DAYS {
                    date = NaiveDate::from_ymd_opt(anchor.year() - 1, month, day)?;
                }
                Some((date, MentionKind::Partial))
            }
        }
    }
}

impl DateRecognizer for RuleRecognizer {
    fn extract(&self, text: &str, anchor: NaiveDate) -> Vec<DateMention> {
        // (start, end, rule order, resolution)
        let mut matches = Vec::new();
        for (order, (rule, re)) in self.rules.iter().enumerate() {
            for caps in re.captures_iter(text) {
                let m = caps.get(0).expect("group 0");
                matches.push((m.start(), m.end(), order, Self::resolve(*rule, &caps, anchor)));
            }
        }
        matches.sort_by(|a, b| {
            (b.1 - b.0)
                .cmp(&(a.1 - a.0))
                .then(a.2.cmp(&b.2))
                .then(a.0.cmp(&b.0))
        });
        let mut taken: Vec<(usize, usize)> = Vec::new();
        let mut out = Vec::new();
        for (start, end, _, resolved) in matches {
            if taken.iter().any(|&(s, e)| start < e && s < end) {
                continue;
            }
            taken.push((start, end));
            if let Some((resolved, kind)) = resolved {
                out.push(DateMention {
                    resolved,
                    span: (start, end),
                    kind,
                });
            }
        }
        out.sort_by_key(|m| m.span.0);
        out
    }
}

fn default_recognizer() -> &'static RuleRecognizer {
    static RECOGNIZER: OnceLock<RuleRecognizer> = OnceLock::new();
    RECOGNIZER.get_or_init(RuleRecognizer::default)
}

/// Extracts date mentions with the default [`RuleRecognizer`].
pub fn extract_date_mentions(sentence_raw: &str, anchor: NaiveDate) -> Vec<DateMention> {
    default_recognizer().extract(sentence_raw, anchor)
}

/// Re-runs mention extraction over every sentence with a custom recognizer.
pub fn annotate_mentions(topic: &mut Topic, recognizer: &dyn DateRecognizer) {
    for article in &mut topic.articles {
        for s in &mut article.sentences {
            s.mentions = recognizer.extract(&s.raw, article.publish_date);
        }
    }
}

/// Inclusive range of mention dates that count as evidence for a topic.
pub fn mention_window(topic: &Topic) -> (NaiveDate, NaiveDate) {
    let (lo, hi) = topic.publication_range();
    (lo - Duration::days(LOOKBACK_DAYS), hi)
}

/// All mentions inside the topic's sanity window, with their sentences.
pub fn windowed_mentions(topic: &Topic) -> impl Iterator<Item = (&Sentence, &DateMention)> {
    let (lo, hi) = mention_window(topic);
    topic
        .sentences()
        .flat_map(|s| s.mentions.iter().map(move |m| (s, m)))
        .filter(move |(_, m)| m.resolved >= lo && m.resolved <= hi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateCandidate {
    pub date: NaiveDate,
    pub mention_count: usize,
    pub pub_article_count: usize,
    pub pub_sentence_count: usize,
}

/// Every publication date plus every in-window mention date, ascending.
pub fn candidate_dates(topic: &Topic) -> Result<Vec<DateCandidate>> {
    if topic.articles.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut by_date: BTreeMap<NaiveDate, DateCandidate> = BTreeMap::new();
    for a in &topic.articles {
        let c = by_date.entry(a.publish_date).or_insert_with(|| empty_candidate(a.publish_date));
        c.pub_article_count += 1;
        c.pub_sentence_count += a.sentences.len();
    }
    for (_, m) in windowed_mentions(topic) {
        by_date
            .entry(m.resolved)
            .or_insert_with(|| empty_candidate(m.resolved))
            .mention_count += 1;
    }
    Ok(by_date.into_values().collect())
}

fn empty_candidate(date: NaiveDate) -> DateCandidate {
    DateCandidate {
        date,
        mention_count: 0,
        pub_article_count: 0,
        pub_sentence_count: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Article, Sentence};

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn dates(text: &str, anchor: &str) -> Vec<(NaiveDate, MentionKind)> {
        extract_date_mentions(text, d(anchor))
            .into_iter()
            .map(|m| (m.resolved, m.kind))
            .collect()
    }

    #[test]
    fn iso_mention() {
        let text = "Is inducted into the Rock and Roll Hall of Fame on 1996-01-17.";
        let ms = extract_date_mentions(text, d("1996-01-18"));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].resolved, d("1996-01-17"));
        assert_eq!(ms[0].kind, MentionKind::Explicit);
        assert_eq!(&text[ms[0].span.0..ms[0].span.1], "1996-01-17");
    }

    #[test]
    fn relative_mentions() {
        assert_eq!(
            dates("He resigned yesterday.", "1994-12-23"),
            vec![(d("1994-12-22"), MentionKind::Relative)]
        );
        assert_eq!(
            dates("Today and tomorrow.", "2020-12-31"),
            vec![(d("2020-12-31"), MentionKind::Relative), (d("2021-01-01"), MentionKind::Relative)]
        );
        assert_eq!(dates("他昨天辞职了", "2020-03-01"), vec![(d("2020-02-29"), MentionKind::Relative)]);
    }

    #[test]
    fn invalid_calendar_dates_are_skipped() {
        assert!(dates("February 30, 2020 was cited.", "2020-03-01").is_empty());
        assert!(dates("On 2019-13-01 nothing.", "2020-03-01").is_empty());
        // invalid in full form must not fall back to the partial reading
        assert!(dates("February 29, 2019 or so.", "2020-03-01").is_empty());
    }

    #[test]
    fn english_and_chinese_full_dates() {
        assert_eq!(
            dates("On March 11, 2011 and 5 June 2012, then 2016年12月6日.", "2020-01-01"),
            vec![
                (d("2011-03-11"), MentionKind::Explicit),
                (d("2012-06-05"), MentionKind::Explicit),
                (d("2016-12-06"), MentionKind::Explicit),
            ]
        );
        assert_eq!(dates("Sept. 3rd, 1999", "2020-01-01"), vec![(d("1999-09-03"), MentionKind::Explicit)]);
        assert_eq!(dates("2016年 12月 6日", "2020-01-01"), vec![(d("2016-12-06"), MentionKind::Explicit)]);
    }

    #[test]
    fn partial_dates_take_anchor_year() {
        assert_eq!(dates("Due on March 5.", "2020-01-10"), vec![(d("2020-03-05"), MentionKind::Partial)]);
        // more than half a year ahead means last year
        assert_eq!(dates("Since December 20.", "2020-01-10"), vec![(d("2019-12-20"), MentionKind::Partial)]);
        assert!(dates("In May 2016 they met.", "2020-01-10").is_empty());
    }

    #[test]
    fn longest_match_wins() {
        let ms = extract_date_mentions("It was March 11, 2011.", d("2020-01-01"));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].kind, MentionKind::Explicit);
    }

    #[test]
    fn extraction_is_deterministic() {
        let text = "Yesterday, on Jan 2 and 2020-01-03, today.";
        let a = extract_date_mentions(text, d("2020-01-05"));
        let b = extract_date_mentions(text, d("2020-01-05"));
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.windows(2).all(|w| w[0].span.0 < w[1].span.0));
    }

    fn article(id: &str, date: &str, sentences: &[&str]) -> Article {
        let publish_date = d(date);
        Article {
            id: id.into(),
            publish_date,
            title: String::new(),
            sentences: sentences
                .iter()
                .enumerate()
                .map(|(i, raw)| Sentence {
                    article_id: id.into(),
                    index: i,
                    raw: raw.to_string(),
                    tokens: crate::corpus::tokenize(raw),
                    mentions: extract_date_mentions(raw, publish_date),
                })
                .collect(),
        }
    }

    fn topic(articles: Vec<Article>) -> Topic {
        Topic {
            name: "t".into(),
            articles,
            queries: vec![],
            reference_timelines: vec![],
        }
    }

    #[test]
    fn single_article_single_candidate() {
        let t = topic(vec![article("a", "2020-01-01", &["Nothing here."])]);
        let c = candidate_dates(&t).unwrap();
        assert_eq!(
            c,
            vec![DateCandidate {
                date: d("2020-01-01"),
                mention_count: 0,
                pub_article_count: 1,
                pub_sentence_count: 1
            }]
        );
    }

    #[test]
    fn counts_by_hand() {
        let t = topic(vec![
            article("a", "2020-01-01", &["It began on 2019-12-31.", "Since 2019-12-31 it grew."]),
            article("b", "2020-01-01", &["Unrelated."]),
        ]);
        let c = candidate_dates(&t).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].date, c[0].mention_count, c[0].pub_article_count), (d("2019-12-31"), 2, 0));
        assert_eq!((c[1].date, c[1].mention_count, c[1].pub_article_count, c[1].pub_sentence_count), (d("2020-01-01"), 0, 2, 3));
    }

    #[test]
    fn ancient_and_future_mentions_excluded() {
        let t = topic(vec![article("a", "2020-01-01", &["In 0099-01-01 and on 2030-01-01."])]);
        let c = candidate_dates(&t).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].date, d("2020-01-01"));
    }
}
