use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tls_core::corpus::{load_dataset, read_timelines, write_timelines, Timeline, TimelineEntry, Topic};
use tls_core::date_ranking::{train_regressor, Regressor};
use tls_core::evaluation::{dataset_stats, date_f1, evaluate_pair, EvalReport, PairScores, StatsReport};
use tls_core::event_ranking::EventDumpRow;
use tls_core::pipeline::{prepare_topic, rank_items, run_topic, Constraint, TopicRun};
use tls_core::selection::{choose_length, KneePoint};

use crate::config::RunConfig;
use crate::error::{CliError, Result, TopicContext};

pub const TRAINING_MANIFEST: &str = "training.json";
pub const RUN_MANIFEST: &str = "manifest.json";
pub const TIMELINES_FILE: &str = "timelines.jsonl";
pub const CLUSTERS_FILE: &str = "clusters.json";

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Which topics each leave-one-out regressor was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub dataset_dir: PathBuf,
    pub lambda: f64,
    /// Held-out topic -> training topics.
    pub held_out: BTreeMap<String, Vec<String>>,
}

/// Trains one regressor per topic on every other topic and writes
/// `<out_dir>/<topic>.json` plus a training manifest.
pub fn cmd_train(dataset_dir: &Path, out_dir: &Path, lambda: f64) -> Result<Vec<PathBuf>> {
    let topics = load_dataset(dataset_dir)?;
    if topics.len() < 2 {
        return Err(CliError::InsufficientTopics(topics.len()));
    }
    if lambda < 0.0 {
        return Err(CliError::Config("lambda must be non-negative".into()));
    }
    let mut manifest = TrainingManifest {
        dataset_dir: dataset_dir.to_path_buf(),
        lambda,
        held_out: BTreeMap::new(),
    };
    let mut written = Vec::new();
    for held in &topics {
        let training: Vec<&Topic> = topics.iter().filter(|t| t.name != held.name).collect();
        let regressor = train_regressor(&training, lambda).in_topic(&held.name)?;
        let path = out_dir.join(format!("{}.json", held.name));
        write_json(&path, &regressor)?;
        manifest
            .held_out
            .insert(held.name.clone(), training.iter().map(|t| t.name.clone()).collect());
        written.push(path);
    }
    write_json(&out_dir.join(TRAINING_MANIFEST), &manifest)?;
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorProvenance {
    pub path: PathBuf,
    pub training_topics: Vec<String>,
    pub regressor: Regressor,
}

/// Loads the held-out regressor for `topic`, refusing one whose training
/// set included the topic itself.
pub fn load_regressor(dir: &Path, topic: &str) -> Result<RegressorProvenance> {
    let path = dir.join(format!("{topic}.json"));
    if !path.is_file() {
        return Err(CliError::MissingRegressor {
            topic: topic.to_string(),
            path,
        });
    }
    let manifest: TrainingManifest = read_json(&dir.join(TRAINING_MANIFEST))?;
    let training_topics = manifest.held_out.get(topic).cloned().unwrap_or_default();
    if training_topics.iter().any(|t| t == topic) {
        return Err(CliError::TopicLeak(topic.to_string()));
    }
    Ok(RegressorProvenance {
        regressor: read_json(&path)?,
        path,
        training_topics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub reference: String,
    pub requested_length: usize,
    pub length: usize,
    pub k: usize,
    pub candidates: usize,
    pub knee: Option<KneePoint>,
    pub mcl_converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicManifest {
    pub topic: String,
    pub regressor: Option<RegressorProvenance>,
    pub runs: Vec<RunRecord>,
}

/// Written next to the generated timelines; together with the dataset it
/// determines every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub topics: Vec<TopicManifest>,
}

struct TopicOutput {
    manifest: TopicManifest,
    timelines: Vec<Timeline>,
    clusters: Option<Vec<EventDumpRow>>,
}

fn record(reference: &str, run: &TopicRun) -> RunRecord {
    RunRecord {
        reference: reference.to_string(),
        requested_length: run.requested_length,
        length: run.timeline.len(),
        k: run.k,
        candidates: run.candidates,
        knee: run.choice.as_ref().map(|c| c.knee.clone()),
        mcl_converged: run.mcl_converged,
    }
}

fn process_topic(topic: &Topic, config: &RunConfig) -> Result<TopicOutput> {
    let provenance = match (&config.regressor_dir, config.pipeline.method.needs_regressor()) {
        (Some(dir), true) => Some(load_regressor(dir, &topic.name)?),
        _ => None,
    };
    let regressor = provenance.as_ref().map(|p| &p.regressor);
    let mut timelines = Vec::new();
    let mut runs = Vec::new();
    let mut last_run = None;
    match config.pipeline.constraint {
        Constraint::Base => {
            for reference in &topic.reference_timelines {
                let run = run_topic(topic, &config.pipeline, regressor, Some(reference)).in_topic(&topic.name)?;
                runs.push(record(&reference.name, &run));
                timelines.push(run.timeline.clone());
                last_run = Some(run);
            }
        }
        Constraint::Adaptive => {
            let run = run_topic(topic, &config.pipeline, regressor, None).in_topic(&topic.name)?;
            let names: Vec<String> = if topic.reference_timelines.is_empty() {
                vec![run.timeline.name.clone()]
            } else {
                topic.reference_timelines.iter().map(|r| r.name.clone()).collect()
            };
            for name in names {
                runs.push(record(&name, &run));
                timelines.push(run.timeline.clone().with_name(name));
            }
            last_run = Some(run);
        }
    }
    let clusters = match (&last_run, config.dump_clusters) {
        (Some(run), true) if run.mcl_converged.is_some() => Some(
            run.ranking
                .items
                .iter()
                .filter_map(|item| {
                    item.event.as_ref().map(|e| EventDumpRow {
                        event_date: e.event_date,
                        score: item.score,
                        article_ids: e.article_ids.clone(),
                    })
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(TopicOutput {
        manifest: TopicManifest {
            topic: topic.name.clone(),
            regressor: provenance,
            runs,
        },
        timelines,
        clusters,
    })
}

/// Generates timelines for every topic. Topics run on a worker pool; all
/// files are written afterwards, in topic order.
pub fn cmd_run(config: &RunConfig) -> Result<RunManifest> {
    config.validate()?;
    let topics = load_dataset(&config.dataset_dir)?;
    let pool = thread_pool(config.jobs)?;
    let outputs: Vec<TopicOutput> = pool.install(|| {
        topics
            .par_iter()
            .map(|t| process_topic(t, config))
            .collect::<Result<Vec<_>>>()
    })?;
    let out = &config.output_dir;
    let mut manifest = RunManifest {
        config: config.clone(),
        topics: Vec::with_capacity(outputs.len()),
    };
    for o in outputs {
        let dir = out.join(&o.manifest.topic);
        write_timelines(&dir.join(TIMELINES_FILE), &o.timelines)?;
        if let Some(rows) = &o.clusters {
            write_json(&dir.join(CLUSTERS_FILE), rows)?;
        }
        manifest.topics.push(o.manifest);
    }
    write_json(&out.join(RUN_MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Scores every (topic, reference) pair against `<pred_dir>/<topic>/timelines.jsonl`
/// and writes `eval.json` and `eval.txt` into `pred_dir`.
pub fn cmd_eval(pred_dir: &Path, dataset_dir: &Path, label: Option<&str>) -> Result<EvalReport> {
    let topics = load_dataset(dataset_dir)?;
    let label = match label {
        Some(l) => l.to_string(),
        None => default_label(pred_dir),
    };
    let per_topic: Vec<Vec<PairScores>> = topics
        .par_iter()
        .map(|topic| evaluate_topic(pred_dir, topic))
        .collect::<Result<_>>()?;
    let report = EvalReport::new(label, per_topic.into_iter().flatten().collect());
    write_json(&pred_dir.join("eval.json"), &report)?;
    let table = pred_dir.join("eval.txt");
    fs::write(&table, report.to_table()).map_err(|e| CliError::io(&table, e))?;
    Ok(report)
}

fn default_label(pred_dir: &Path) -> String {
    match read_json::<RunManifest>(&pred_dir.join(RUN_MANIFEST)) {
        Ok(m) => {
            let v = serde_json::to_value(&m.config.pipeline).unwrap_or_default();
            format!(
                "{} {}",
                v["method"].as_str().unwrap_or("?"),
                v["constraint"].as_str().unwrap_or("?")
            )
        }
        Err(_) => pred_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "predictions".into()),
    }
}

fn evaluate_topic(pred_dir: &Path, topic: &Topic) -> Result<Vec<PairScores>> {
    let missing = |reference: &str| CliError::MissingPrediction {
        topic: topic.name.clone(),
        reference: reference.to_string(),
    };
    let path = pred_dir.join(&topic.name).join(TIMELINES_FILE);
    let predictions = match read_timelines(&path) {
        Ok(p) => p,
        Err(tls_core::Error::NotFound(_)) => match topic.reference_timelines.first() {
            Some(r) => return Err(missing(&r.name)),
            None => return Ok(vec![]),
        },
        Err(e) => return Err(e).in_topic(&topic.name),
    };
    topic
        .reference_timelines
        .iter()
        .map(|reference| {
            let pred = predictions
                .iter()
                .find(|p| p.name == reference.name)
                .ok_or_else(|| missing(&reference.name))?;
            Ok(PairScores {
                topic: topic.name.clone(),
                reference: reference.name.clone(),
                scores: evaluate_pair(pred, reference).in_topic(&topic.name)?,
            })
        })
        .collect()
}

pub fn cmd_stats(dataset_dir: &Path) -> Result<StatsReport> {
    Ok(dataset_stats(&load_dataset(dataset_dir)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KneeRow {
    pub c: usize,
    pub sc: f64,
    /// Date F1 of the top-c dates against each reference, in reference order.
    pub date_f1: Vec<f64>,
    pub is_knee: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KneeCurve {
    pub topic: String,
    pub references: Vec<String>,
    pub rows: Vec<KneeRow>,
    pub knee: KneePoint,
    pub length: usize,
}

/// The selection-confidence curve of one topic with its knee and, per
/// reference timeline, the Date F1 obtained by keeping the top `c` items.
pub fn cmd_knee_curve(config: &RunConfig, topic_name: &str) -> Result<KneeCurve> {
    config.validate()?;
    let topics = load_dataset(&config.dataset_dir)?;
    let topic = topics
        .iter()
        .find(|t| t.name == topic_name)
        .ok_or_else(|| CliError::UnknownTopic(topic_name.to_string()))?;
    let provenance = match (&config.regressor_dir, config.pipeline.method.needs_regressor()) {
        (Some(dir), true) => Some(load_regressor(dir, topic_name)?),
        _ => None,
    };
    let prepared = prepare_topic(topic, &config.pipeline);
    let ranking = rank_items(&prepared, &config.pipeline, provenance.as_ref().map(|p| &p.regressor))
        .in_topic(topic_name)?;
    let choice = choose_length(&ranking.scores(), &config.pipeline.selection).in_topic(topic_name)?;
    let rows = choice
        .curve
        .points
        .iter()
        .map(|&(c, sc)| {
            let pred = Timeline::from_entries(
                "top",
                ranking
                    .top_dates(c)
                    .into_iter()
                    .map(|date| TimelineEntry {
                        date,
                        summary: vec![String::new()],
                    })
                    .collect(),
            );
            let date_f1 = topic
                .reference_timelines
                .iter()
                .map(|r| date_f1(&pred, r).map(|p| p.f1))
                .collect::<std::result::Result<Vec<_>, _>>()
                .in_topic(topic_name)?;
            Ok(KneeRow {
                c,
                sc,
                date_f1,
                is_knee: c == choice.length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KneeCurve {
        topic: topic_name.to_string(),
        references: topic.reference_timelines.iter().map(|r| r.name.clone()).collect(),
        rows,
        knee: choice.knee,
        length: choice.length,
    })
}

impl KneeCurve {
    /// CSV with columns `c, sc, date_f1[<reference>]..., is_knee`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["c".to_string(), "sc".to_string()];
        header.extend(self.references.iter().map(|r| format!("date_f1[{r}]")));
        header.push("is_knee".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.c.to_string(), row.sc.to_string()];
            rec.extend(row.date_f1.iter().map(f64::to_string));
            rec.push(row.is_knee.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io("<csv>", e))?;
        Ok(())
    }
}
