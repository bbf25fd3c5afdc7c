//! Dataset directory I/O.
//!
//! A topic lives in its own directory holding `articles.jsonl`,
//! `timelines.jsonl` and optionally `keywords.json`.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{sentence_split, tokenize, Article, Sentence, Timeline, TimelineEntry, Topic};
use crate::error::{Error, Result};
use crate::temporal::extract_date_mentions;

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Deserialize, Serialize)]
struct ArticleRecord {
    id: String,
    publish_date: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pretokenized: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TimelineRecord {
    name: String,
    entries: Vec<EntryRecord>,
}

#[derive(Debug, Deserialize, Serialize)]
struct EntryRecord {
    date: String,
    summary: Vec<String>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct KeywordsRecord {
    #[serde(default)]
    queries: Vec<String>,
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, DATE_FORMAT).map_err(|_| Error::Date(s.to_string()))
}

/// Parses each non-blank line of a JSONL file, reporting 1-based line numbers.
fn read_jsonl<T, F>(path: &Path, mut f: F) -> Result<()>
where
    T: for<'de> Deserialize<'de>,
    F: FnMut(usize, T) -> Result<()>,
{
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        f(i + 1, record)?;
    }
    Ok(())
}

fn build_article(record: ArticleRecord) -> Result<Article> {
    let publish_date = parse_date(&record.publish_date)?;
    let sentences = make_sentences(&record.id, &record.text, record.pretokenized, publish_date);
    Ok(Article {
        id: record.id,
        publish_date,
        title: record.title,
        sentences,
    })
}

/// Splits, tokenizes and date-annotates article text. Pre-tokenized
/// sentences are paired with the split text when the counts agree and
/// otherwise stand in for it (tokens joined by spaces).
pub(crate) fn make_sentences(
    article_id: &str,
    text: &str,
    pretokenized: Option<Vec<Vec<String>>>,
    publish_date: NaiveDate,
) -> Vec<Sentence> {
    let mut raws = sentence_split(text);
    let token_lists: Vec<Vec<String>> = match pretokenized {
        Some(pre) => {
            if pre.len() != raws.len() {
                raws = pre.iter().map(|toks| toks.join(" ")).collect();
            }
            pre
        }
        None => raws.iter().map(|r| tokenize(r)).collect(),
    };
    raws.into_iter()
        .zip(token_lists)
        .enumerate()
        .map(|(index, (raw, tokens))| Sentence {
            article_id: article_id.to_string(),
            index,
            mentions: extract_date_mentions(&raw, publish_date),
            raw,
            tokens,
        })
        .collect()
}

/// Reads every timeline in a `timelines.jsonl` file.
pub fn read_timelines(path: &Path) -> Result<Vec<Timeline>> {
    let mut out = Vec::new();
    read_jsonl(path, |_, rec: TimelineRecord| {
        let entries = rec
            .entries
            .into_iter()
            .map(|e| {
                Ok(TimelineEntry {
                    date: parse_date(&e.date)?,
                    summary: e.summary,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Timeline::from_entries(rec.name, entries));
        Ok(())
    })?;
    Ok(out)
}

pub fn write_timelines(path: &Path, timelines: &[Timeline]) -> Result<()> {
    let mut w = create(path)?;
    for tl in timelines {
        let rec = TimelineRecord {
            name: tl.name.clone(),
            entries: tl
                .entries()
                .iter()
                .map(|e| EntryRecord {
                    date: e.date.format(DATE_FORMAT).to_string(),
                    summary: e.summary.clone(),
                })
                .collect(),
        };
        write_line(&mut w, path, &rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads one topic directory. The topic is named after the directory.
pub fn load_topic(dir: &Path) -> Result<Topic> {
    let articles_path = dir.join("articles.jsonl");
    let mut articles = Vec::new();
    let mut ids = HashSet::new();
    read_jsonl(&articles_path, |line, rec: ArticleRecord| {
        if !ids.insert(rec.id.clone()) {
            return Err(Error::Parse {
                file: articles_path.clone(),
                line,
                message: format!("duplicate article id {:?}", rec.id),
            });
        }
        articles.push(build_article(rec)?);
        Ok(())
    })?;
    if articles.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let reference_timelines = read_timelines(&dir.join("timelines.jsonl"))?;

    let keywords_path = dir.join("keywords.json");
    let queries = if keywords_path.exists() {
        let text = fs::read_to_string(&keywords_path).map_err(|e| Error::io(&keywords_path, e))?;
        let rec: KeywordsRecord = serde_json::from_str(&text).map_err(|e| Error::Parse {
            file: keywords_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        rec.queries
    } else {
        Vec::new()
    };

    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Topic {
        name,
        articles,
        queries,
        reference_timelines,
    })
}

/// Loads every topic directory under `dir`, ordered by name.
pub fn load_dataset(dir: &Path) -> Result<Vec<Topic>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.join("articles.jsonl").is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| load_topic(d)).collect()
}

/// Writes a topic in the dataset layout. Sentences are stored both as text
/// and as `pretokenized` token lists so that reloading reproduces them.
pub fn write_topic(topic: &Topic, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("articles.jsonl");
    let mut w = create(&path)?;
    for a in &topic.articles {
        let rec = ArticleRecord {
            id: a.id.clone(),
            publish_date: a.publish_date.format(DATE_FORMAT).to_string(),
            title: a.title.clone(),
            text: a
                .sentences
                .iter()
                .map(|s| s.raw.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            pretokenized: Some(a.sentences.iter().map(|s| s.tokens.clone()).collect()),
        };
        write_line(&mut w, &path, &rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    write_timelines(&dir.join("timelines.jsonl"), &topic.reference_timelines)?;

    if !topic.queries.is_empty() {
        let path = dir.join("keywords.json");
        let rec = KeywordsRecord {
            queries: topic.queries.clone(),
        };
        let text = serde_json::to_string_pretty(&rec).expect("keywords serialize");
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(BufWriter::new(
        fs::File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

fn write_line<T: Serialize>(w: &mut impl Write, path: &Path, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, value).expect("record serialize");
    w.write_all(b"\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &str) {
        fs::write(dir.join(name), content).unwrap();
    }

    #[test]
    fn smallest_topic() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "articles.jsonl",
            r#"{"id":"a1","publish_date":"2020-01-01","title":"T","text":"A. B."}"#,
        );
        write(tmp.path(), "timelines.jsonl", "");
        let topic = load_topic(tmp.path()).unwrap();
        assert_eq!(topic.articles.len(), 1);
        assert_eq!(topic.sentence_count(), 2);
        assert_eq!(topic.articles[0].sentences[1].index, 1);
        assert!(topic.queries.is_empty());
    }

    #[test]
    fn missing_publish_date_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "articles.jsonl",
            "{\"id\":\"a1\",\"publish_date\":\"2020-01-01\",\"text\":\"A.\"}\n{\"id\":\"a2\",\"text\":\"B.\"}\n",
        );
        write(tmp.path(), "timelines.jsonl", "");
        match load_topic(tmp.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_date_and_missing_file() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(load_topic(tmp.path()), Err(Error::NotFound(_))));
        write(
            tmp.path(),
            "articles.jsonl",
            r#"{"id":"a1","publish_date":"2020-02-30","text":"A."}"#,
        );
        write(tmp.path(), "timelines.jsonl", "");
        assert!(matches!(load_topic(tmp.path()), Err(Error::Date(s)) if s == "2020-02-30"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "articles.jsonl",
            "{\"id\":\"a\",\"publish_date\":\"2020-01-01\",\"text\":\"A.\"}\n{\"id\":\"a\",\"publish_date\":\"2020-01-01\",\"text\":\"B.\"}\n",
        );
        write(tmp.path(), "timelines.jsonl", "");
        assert!(matches!(load_topic(tmp.path()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn pretokenized_input_is_taken_verbatim() {
        let tmp = tempfile::tempdir().unwrap();
        write(
            tmp.path(),
            "articles.jsonl",
            r#"{"id":"c","publish_date":"2020-01-01","title":"","text":"中国人民。今天下雨。","pretokenized":[["中国","人民"],["今天","下雨"]]}"#,
        );
        write(
            tmp.path(),
            "timelines.jsonl",
            r#"{"name":"ref","entries":[{"date":"2020-01-01","summary":["今天下雨。"]}]}"#,
        );
        let topic = load_topic(tmp.path()).unwrap();
        let s = &topic.articles[0].sentences;
        assert_eq!(s[0].raw, "中国人民。");
        assert_eq!(s[0].tokens, vec!["中国", "人民"]);
        assert_eq!(s[1].mentions.len(), 1);
        assert_eq!(topic.reference_timelines[0].len(), 1);
    }
}
