//! Experiment runner: train leave-one-topic-out regressors, generate
//! timelines under a length constraint, evaluate them and report dataset
//! statistics and selection-confidence curves.

pub mod commands;
pub mod config;
pub mod error;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tls_core::evaluation::StatsReport;
use tls_core::pipeline::{Constraint, Method};
use tls_core::summarizer::{KPolicy, SummaryMethod};

pub use commands::{cmd_eval, cmd_knee_curve, cmd_run, cmd_stats, cmd_train};
pub use config::RunConfig;
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "tls", version, about = "Timeline summarization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one regressor per held-out topic.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = tls_core::date_ranking::DEFAULT_LAMBDA)]
        lambda: f64,
    },
    /// Generate timelines for every topic of a dataset.
    Run(ConfigArgs),
    /// Score generated timelines against the references.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        label: Option<String>,
    },
    /// Dataset statistics table.
    Stats {
        #[arg(long, required = true)]
        dataset: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Selection-confidence curve of one topic as CSV.
    KneeCurve {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        topic: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_k_policy(s: &str) -> std::result::Result<KPolicy, String> {
    match s {
        "expert" => Ok(KPolicy::Expert),
        "one" => Ok(KPolicy::One),
        n => n
            .parse()
            .map(KPolicy::Fixed)
            .map_err(|_| format!("expected expert, one or an integer, got {n:?}")),
    }
}

fn parse_enum<T: for<'de> serde::Deserialize<'de>>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// A JSON config file plus per-field overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub regressors: Option<PathBuf>,
    /// datewise | clust | adprm-d | adprm-e
    #[arg(long, value_parser = parse_enum::<Method>)]
    pub method: Option<Method>,
    /// base | adaptive
    #[arg(long, value_parser = parse_enum::<Constraint>)]
    pub constraint: Option<Constraint>,
    /// expert | one | <k>
    #[arg(long, value_parser = parse_k_policy)]
    pub k_policy: Option<KPolicy>,
    /// rank | opt
    #[arg(long, value_parser = parse_enum::<SummaryMethod>)]
    pub summarizer: Option<SummaryMethod>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub sensitivity: Option<f64>,
    #[arg(long)]
    pub c_max: Option<usize>,
    #[arg(long)]
    pub graph_threshold: Option<f64>,
    #[arg(long)]
    pub inflation: Option<f64>,
    #[arg(long)]
    pub expansion: Option<u32>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub restrict_events: bool,
    #[arg(long)]
    pub query_filter: bool,
    #[arg(long)]
    pub dump_clusters: bool,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let p = &mut c.pipeline;
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value.clone() {
                    $field = v;
                }
            };
        }
        set!(c.dataset_dir, self.dataset);
        set!(c.output_dir, self.out);
        set!(p.method, self.method);
        set!(p.constraint, self.constraint);
        set!(p.k_policy, self.k_policy);
        set!(p.selection.alpha, self.alpha);
        set!(p.selection.sensitivity, self.sensitivity);
        set!(p.graph_threshold, self.graph_threshold);
        set!(p.mcl.inflation, self.inflation);
        set!(p.mcl.expansion, self.expansion);
        set!(p.mcl.max_iter, self.max_iter);
        set!(p.mcl.eps, self.eps);
        set!(c.seed, self.seed);
        if self.summarizer.is_some() {
            p.summarizer = self.summarizer;
        }
        if self.c_max.is_some() {
            p.selection.c_max = self.c_max;
        }
        if self.regressors.is_some() {
            c.regressor_dir = self.regressors.clone();
        }
        if self.jobs.is_some() {
            c.jobs = self.jobs;
        }
        p.restrict_events |= self.restrict_events;
        p.query_filter |= self.query_filter;
        c.dump_clusters |= self.dump_clusters;
        Ok(c)
    }
}

/// Executes a parsed command, writing human-readable output to `out`.
pub fn execute<W: Write>(cli: Cli, mut out: W) -> Result<()> {
    let wr = |e: std::io::Error| CliError::io("<stdout>", e);
    match cli.command {
        Command::Train {
            dataset,
            out: dir,
            lambda,
        } => {
            for path in cmd_train(&dataset, &dir, lambda)? {
                writeln!(out, "{}", path.display()).map_err(wr)?;
            }
        }
        Command::Run(args) => {
            let config = args.resolve()?;
            let manifest = cmd_run(&config)?;
            for t in &manifest.topics {
                for r in &t.runs {
                    writeln!(out, "{}\t{}\tl={}\tk={}", t.topic, r.reference, r.length, r.k).map_err(wr)?;
                }
            }
        }
        Command::Eval {
            pred,
            dataset,
            label,
        } => {
            let report = cmd_eval(&pred, &dataset, label.as_deref())?;
            write!(out, "{}", report.to_table()).map_err(wr)?;
        }
        Command::Stats { dataset, json } => {
            let reports = dataset
                .iter()
                .map(|d| cmd_stats(d))
                .collect::<Result<Vec<_>>>()?;
            let names: Vec<String> = dataset
                .iter()
                .map(|d| {
                    d.file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default()
                })
                .collect();
            if json {
                let map: std::collections::BTreeMap<&str, &StatsReport> =
                    names.iter().map(String::as_str).zip(&reports).collect();
                let text = serde_json::to_string_pretty(&map).expect("stats serialize");
                writeln!(out, "{text}").map_err(wr)?;
            } else {
                let columns: Vec<(&str, &StatsReport)> =
                    names.iter().map(String::as_str).zip(&reports).collect();
                write!(out, "{}", StatsReport::table(&columns)).map_err(wr)?;
            }
        }
        Command::KneeCurve { config, topic, csv } => {
            let curve = cmd_knee_curve(&config.resolve()?, &topic)?;
            match csv {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                    curve.write_csv(file)?;
                }
                None => curve.write_csv(&mut out)?,
            }
        }
    }
    Ok(())
}
