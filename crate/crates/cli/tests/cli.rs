use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tls_cli::commands::{load_regressor, TrainingManifest, TRAINING_MANIFEST};
use tls_cli::{cmd_eval, cmd_knee_curve, cmd_run, cmd_stats, cmd_train, CliError, RunConfig};
use tls_core::corpus::{load_dataset, read_timelines, write_timelines, write_topic, Timeline, TimelineEntry};
use tls_core::date_ranking::train_regressor;
use tls_core::evaluation::{evaluate_pair, StatsReport};
use tls_core::pipeline::{Constraint, Method};
use tls_core::selection::choose_length;
use tls_core::summarizer::KPolicy;
use tls_core::synthetic::{planted_topic, PlantedSpec};

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mini")
}

fn planted_dataset(dir: &Path, seeds: &[u64]) {
    for &s in seeds {
        let c = planted_topic(&format!("planted-{s}"), s, &PlantedSpec::default());
        write_topic(&c.topic, &dir.join(&c.topic.name)).unwrap();
    }
}

struct Fixture {
    _tmp: tempfile::TempDir,
    data: PathBuf,
    regressors: PathBuf,
    root: PathBuf,
}

fn trained(seeds: &[u64]) -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_path_buf();
    let data = root.join("data");
    planted_dataset(&data, seeds);
    let regressors = root.join("regressors");
    cmd_train(&data, &regressors, 1.0).unwrap();
    Fixture {
        _tmp: tmp,
        data,
        regressors,
        root,
    }
}

fn config(f: &Fixture, out: &str) -> RunConfig {
    RunConfig {
        dataset_dir: f.data.clone(),
        output_dir: f.root.join(out),
        regressor_dir: Some(f.regressors.clone()),
        ..RunConfig::default()
    }
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn train_writes_one_regressor_per_topic() {
    let f = trained(&[1, 2]);
    let files: Vec<_> = ["planted-1.json", "planted-2.json"]
        .iter()
        .map(|n| f.regressors.join(n))
        .collect();
    assert!(files.iter().all(|p| p.is_file()));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(json["weights"].as_array().unwrap().len(), 9);
    assert!(json["bias"].is_f64());
    assert_eq!(json["lambda"], 1.0);

    // each file equals training directly on the other topic
    let topics = load_dataset(&f.data).unwrap();
    let expected = train_regressor(&[&topics[1]], 1.0).unwrap();
    let got = load_regressor(&f.regressors, "planted-1").unwrap();
    assert_eq!(got.regressor, expected);
    assert_eq!(got.training_topics, ["planted-2"]);
}

#[test]
fn train_needs_two_topics() {
    let tmp = tempfile::tempdir().unwrap();
    planted_dataset(tmp.path(), &[1]);
    let err = cmd_train(tmp.path(), &tmp.path().join("r"), 1.0).unwrap_err();
    assert!(matches!(err, CliError::InsufficientTopics(1)));
}

#[test]
fn leaked_regressor_is_rejected() {
    let f = trained(&[1, 2]);
    let path = f.regressors.join(TRAINING_MANIFEST);
    let mut m: TrainingManifest = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    m.held_out.get_mut("planted-1").unwrap().push("planted-1".into());
    fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
    let err = cmd_run(&config(&f, "out")).unwrap_err();
    assert!(matches!(err, CliError::TopicLeak(t) if t == "planted-1"));
}

#[test]
fn adaptive_run_with_one_sentence_per_date() {
    let f = trained(&[1, 2, 3]);
    let c = config(&f, "out");
    let manifest = cmd_run(&c).unwrap();
    assert_eq!(manifest.topics.len(), 3);
    for t in &manifest.topics {
        let tls = read_timelines(&c.output_dir.join(&t.topic).join("timelines.jsonl")).unwrap();
        assert_eq!(tls.len(), 1);
        assert_eq!(tls[0].name, "planted");
        assert!(tls[0].entries().iter().all(|e| e.summary.len() == 1));
        let run = &t.runs[0];
        assert!(run.requested_length.abs_diff(5) <= 2, "{}", run.requested_length);
        assert_eq!(run.knee.as_ref().unwrap().c_star, run.requested_length);
        assert!(t.regressor.as_ref().unwrap().training_topics.iter().all(|n| n != &t.topic));
    }
}

#[test]
fn base_run_uses_reference_length() {
    let f = trained(&[1, 2]);
    let mut c = config(&f, "base");
    c.pipeline.method = Method::Datewise;
    c.pipeline.constraint = Constraint::Base;
    c.pipeline.k_policy = KPolicy::Expert;
    let manifest = cmd_run(&c).unwrap();
    let topics = load_dataset(&f.data).unwrap();
    for (t, m) in topics.iter().zip(&manifest.topics) {
        let reference = &t.reference_timelines[0];
        assert_eq!(m.runs[0].requested_length, reference.len());
        assert!(m.runs[0].length <= reference.len());
        assert!(m.runs[0].knee.is_none());
    }
}

#[test]
fn event_run_dumps_clusters() {
    let f = trained(&[1, 2]);
    let mut c = config(&f, "events");
    c.pipeline.method = Method::AdprmE;
    c.regressor_dir = None;
    c.dump_clusters = true;
    cmd_run(&c).unwrap();
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(c.output_dir.join("planted-1/clusters.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    for key in ["event_date", "score", "article_ids"] {
        assert!(rows[0].get(key).is_some());
    }
}

#[test]
fn runs_are_byte_identical() {
    let f = trained(&[1, 2, 3]);
    let mut a = config(&f, "a");
    a.jobs = Some(1);
    let mut b = config(&f, "b");
    b.jobs = Some(4);
    cmd_run(&a).unwrap();
    cmd_run(&b).unwrap();
    let (da, db) = (read_dir_bytes(&a.output_dir), read_dir_bytes(&b.output_dir));
    assert_eq!(da.len(), db.len());
    for (k, v) in &da {
        if k.ends_with("manifest.json") {
            continue; // echoes differing output_dir and jobs
        }
        assert_eq!(Some(v), db.get(k), "{}", k.display());
    }
}

#[test]
fn manifest_alone_reproduces_the_run() {
    let f = trained(&[1, 2]);
    let c = config(&f, "first");
    cmd_run(&c).unwrap();
    let text = fs::read_to_string(c.output_dir.join("manifest.json")).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut again: RunConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    let first = read_dir_bytes(&c.output_dir);
    again.output_dir = f.root.join("second");
    cmd_run(&again).unwrap();
    let second = read_dir_bytes(&again.output_dir);
    for (k, v) in &first {
        if !k.ends_with("manifest.json") {
            assert_eq!(Some(v), second.get(k));
        }
    }
}

fn copy_references(dataset: &Path, pred: &Path, shift_days: i64) {
    for t in load_dataset(dataset).unwrap() {
        let tls: Vec<Timeline> = t
            .reference_timelines
            .iter()
            .map(|r| {
                Timeline::from_entries(
                    r.name.clone(),
                    r.entries()
                        .iter()
                        .map(|e| TimelineEntry {
                            date: e.date + chrono::Duration::days(shift_days),
                            summary: e.summary.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        write_timelines(&pred.join(&t.name).join("timelines.jsonl"), &tls).unwrap();
    }
}

#[test]
fn eval_of_references_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    copy_references(&mini(), tmp.path(), 0);
    let report = cmd_eval(tmp.path(), &mini(), Some("oracle")).unwrap();
    assert_eq!(report.pairs.len(), 4);
    for s in [report.macro_avg.date_f1, report.macro_avg.ar1, report.macro_avg.ar2] {
        assert!((s.f1 - 1.0).abs() < 1e-12);
    }
    assert!(tmp.path().join("eval.json").is_file());
    let table = fs::read_to_string(tmp.path().join("eval.txt")).unwrap();
    assert!(table.contains("oracle"));
}

#[test]
fn eval_of_disjoint_dates_scores_zero_date_f1() {
    let tmp = tempfile::tempdir().unwrap();
    copy_references(&mini(), tmp.path(), 400);
    let report = cmd_eval(tmp.path(), &mini(), None).unwrap();
    assert_eq!(report.macro_avg.date_f1.f1, 0.0);
}

#[test]
fn eval_report_composes_pair_scores() {
    let f = trained(&[1, 2]);
    let c = config(&f, "out");
    cmd_run(&c).unwrap();
    let report = cmd_eval(&c.output_dir, &f.data, None).unwrap();
    assert_eq!(report.label, "adprm-d adaptive");
    for t in load_dataset(&f.data).unwrap() {
        let pred = &read_timelines(&c.output_dir.join(&t.name).join("timelines.jsonl")).unwrap()[0];
        let direct = evaluate_pair(pred, &t.reference_timelines[0]).unwrap();
        let pair = report.pairs.iter().find(|p| p.topic == t.name).unwrap();
        assert_eq!(pair.scores, direct);
    }
}

#[test]
fn eval_reports_missing_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    copy_references(&mini(), tmp.path(), 0);
    fs::remove_dir_all(tmp.path().join("river-flood")).unwrap();
    let err = cmd_eval(tmp.path(), &mini(), None).unwrap_err();
    assert!(matches!(err, CliError::MissingPrediction { ref topic, .. } if topic == "river-flood"));
}

#[test]
fn knee_curve_is_consistent() {
    let f = trained(&[1, 2]);
    let c = config(&f, "out");
    let curve = cmd_knee_curve(&c, "planted-1").unwrap();
    for w in curve.rows.windows(2) {
        assert!(w[1].sc >= w[0].sc - 1e-12);
    }
    let flagged: Vec<usize> = curve.rows.iter().filter(|r| r.is_knee).map(|r| r.c).collect();
    assert_eq!(flagged, [curve.length]);

    let topics = load_dataset(&f.data).unwrap();
    let r = load_regressor(&f.regressors, "planted-1").unwrap().regressor;
    let ranking = tls_core::pipeline::rank_items(&topics[0], &c.pipeline, Some(&r)).unwrap();
    assert_eq!(choose_length(&ranking.scores(), &c.pipeline.selection).unwrap().length, curve.length);

    let mut buf = Vec::new();
    curve.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("c,sc,date_f1[planted],is_knee\n"));
    assert_eq!(text.lines().count(), curve.rows.len() + 1);

    assert!(matches!(cmd_knee_curve(&c, "nope"), Err(CliError::UnknownTopic(_))));
}

#[test]
fn stats_on_mini_dataset() {
    let expected: StatsReport =
        serde_json::from_str(&fs::read_to_string(mini().join("expected_stats.json")).unwrap()).unwrap();
    assert_eq!(cmd_stats(&mini()).unwrap(), expected);
}

#[test]
fn binary_reports_structured_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tls"))
        .args(["knee-curve", "--topic", "x", "--method", "adprm-e", "--dataset"])
        .arg(tmp.path().join("missing"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NotFound");

    let out = Command::new(env!("CARGO_BIN_EXE_tls"))
        .args(["run", "--method", "clust", "--constraint", "adaptive", "--dataset"])
        .arg(mini())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "InvalidConfig");
}

#[test]
fn binary_stats_table() {
    let out = Command::new(env!("CARGO_BIN_EXE_tls"))
        .args(["stats", "--dataset"])
        .arg(mini())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("Dataset"));
    assert!(text.contains("AvgDateCov"));
}

#[test]
fn config_file_with_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.json");
    fs::write(&path, r#"{"dataset_dir":"d","method":"adprm-e","k_policy":"expert","selection":{"alpha":0.5,"sensitivity":1.0,"c_max":null}}"#).unwrap();
    let cli = <tls_cli::Cli as clap::Parser>::try_parse_from([
        "tls", "run", "--config", path.to_str().unwrap(), "--k-policy", "3", "--alpha", "0.02", "--jobs", "2",
    ])
    .unwrap();
    let tls_cli::Command::Run(args) = cli.command else {
        panic!("expected run");
    };
    let c = args.resolve().unwrap();
    assert_eq!(c.pipeline.method, Method::AdprmE);
    assert_eq!(c.pipeline.k_policy, KPolicy::Fixed(3));
    assert_eq!(c.pipeline.selection.alpha, 0.02);
    assert_eq!(c.jobs, Some(2));
    assert_eq!(c.dataset_dir, PathBuf::from("d"));
}
