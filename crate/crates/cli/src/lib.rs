//! Command-line pipeline: ingest Google Trends exports, run the exploratory
//! statistics, build SAX, eSAX and topological features, cluster them and
//! compare the clusterings. Every command writes CSV files plus a JSON
//! manifest with input and output digests.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use trendscape::clustering::Method;
use trendscape::dataset::{archetype_dataset, to_canonical_csv};
use trendscape::topology::{compute_diagrams, SeriesDiagrams};

use commands::*;
use config::{Overrides, PipelineConfig};
use error::{CliError, Result};
use report::Representation;
use run::Run;

#[derive(Debug, Parser)]
#[command(name = "trendscape", version, about = "Cluster weekly search-interest series by symbolic and topological shape")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, merge and validate exports into a canonical dataset
    Ingest {
        /// Export files or directories of them
        inputs: Vec<PathBuf>,
        /// Exit 0 even if validation reports problems
        #[arg(long)]
        allow_warnings: bool,
    },
    /// Summary statistics, correlations, KS and ADF tables, rolling bands
    Eda { inputs: Vec<PathBuf> },
    /// Sliding-window SAX word dump
    Sax { inputs: Vec<PathBuf> },
    /// Sliding-window eSAX word dump
    Esax { inputs: Vec<PathBuf> },
    /// Persistence diagrams and landscapes
    Tda { inputs: Vec<PathBuf> },
    /// Cluster one representation with one method
    Cluster {
        inputs: Vec<PathBuf>,
        /// SAX, eSAX or TDA
        #[arg(long, short)]
        representation: Representation,
        /// KMEANS or WARD
        #[arg(long, short)]
        method: Method,
    },
    /// Collect scores files into one comparison table
    Report {
        /// Directory holding scores_*.csv (defaults to --out)
        run_dir: Option<PathBuf>,
    },
    /// Every stage, all six representation and method combinations
    RunAll {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        allow_warnings: bool,
    },
    /// Write a synthetic archetype dataset
    Synth {
        /// Weeks per series
        #[arg(long, default_value_t = 262)]
        length: usize,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(Overrides::load).transpose()?;
    let cfg = PipelineConfig::resolve(cli.settings, file)?;
    match cli.command {
        Command::Ingest {
            inputs,
            allow_warnings,
        } => {
            let mut run = Run::new("ingest", &cfg)?;
            let paths = input_paths(inputs, &cfg);
            let d = load_dataset(&mut run, &paths)?;
            let outcome = run.stage("ingest", |s| ingest_stage(s, &d, allow_warnings));
            run.finish("manifest_ingest.json")?;
            outcome?;
            println!("{} series x {} weeks -> {}", d.len(), d.time_axis().len(), cfg.out.join(DATASET_FILE).display());
        }
        Command::Eda { inputs } => {
            let (mut run, d) = open("eda", inputs, &cfg)?;
            run.stage("eda", |s| eda_stage(s, &d))?;
            run.finish("manifest_eda.json")?;
        }
        Command::Sax { inputs } => single_symbolic(Representation::Sax, inputs, &cfg)?,
        Command::Esax { inputs } => single_symbolic(Representation::Esax, inputs, &cfg)?,
        Command::Tda { inputs } => {
            let (mut run, d) = open("tda", inputs, &cfg)?;
            run.stage("tda", |s| tda_stage(s, &d, &cfg))?;
            run.finish("manifest_tda.json")?;
        }
        Command::Cluster {
            inputs,
            representation,
            method,
        } => {
            let tag = run_tag(representation, method);
            let (mut run, d) = open(format!("cluster {tag}"), inputs, &cfg)?;
            let m = run.stage(representation.tag(), |s| {
                check_k(&d, &cfg).map_err(s.fail())?;
                match representation {
                    Representation::Tda => {
                        let diagrams = compute_diagrams(&d, &cfg.tda_params()).map_err(s.fail())?;
                        tda_matrix(&diagrams, &cfg, cfg.strategy_for(method)).map_err(s.fail())
                    }
                    rep => {
                        let kind = if rep == Representation::Sax {
                            trendscape::symbolic::WordKind::Sax
                        } else {
                            trendscape::symbolic::WordKind::Esax
                        };
                        symbolic_matrix(&words(&d, &cfg, kind).map_err(s.fail())?).map_err(s.fail())
                    }
                }
            })?;
            let rows = run.stage(&format!("cluster_{tag}"), |s| cluster_stage(s, &d, &m, &cfg, representation, method))?;
            run.finish(&format!("manifest_cluster_{tag}.json"))?;
            for r in rows {
                println!("{} {} {} {}", r.method.name(), r.representation, r.metric.name(), r.value);
            }
        }
        Command::Report { run_dir } => {
            let dir = run_dir.unwrap_or_else(|| cfg.out.clone());
            let rows = collect_scores(&dir)?;
            let cfg = PipelineConfig { out: dir, ..cfg };
            let mut run = Run::new("report", &cfg)?;
            run.stage("report", |s| report_stage(s, &rows))?;
            run.finish("manifest_report.json")?;
        }
        Command::RunAll {
            inputs,
            allow_warnings,
        } => run_all(inputs, allow_warnings, &cfg)?,
        Command::Synth { length } => {
            let mut run = Run::new("synth", &cfg)?;
            run.stage("synth", |s| {
                let d = archetype_dataset(length, cfg.seed).map_err(s.fail())?;
                s.write("synthetic.csv", to_canonical_csv(&d).as_bytes())
            })?;
            run.finish("manifest_synth.json")?;
        }
    }
    Ok(())
}

/// Loads and validates the inputs of a downstream command.
fn open(
    command: impl Into<String>,
    inputs: Vec<PathBuf>,
    cfg: &PipelineConfig,
) -> Result<(Run, trendscape::dataset::Dataset)> {
    let mut run = Run::new(command, cfg)?;
    let d = load_dataset(&mut run, &input_paths(inputs, cfg))?;
    require_valid(&d)?;
    Ok((run, d))
}

fn single_symbolic(rep: Representation, inputs: Vec<PathBuf>, cfg: &PipelineConfig) -> Result<()> {
    let (mut run, d) = open(rep.tag(), inputs, cfg)?;
    run.stage(rep.tag(), |s| symbolic_stage(s, &d, cfg, rep).map(drop))?;
    run.finish(&format!("manifest_{}.json", rep.tag()))?;
    Ok(())
}

fn run_all(inputs: Vec<PathBuf>, allow_warnings: bool, cfg: &PipelineConfig) -> Result<()> {
    let mut run = Run::new("run-all", cfg)?;
    let d = load_dataset(&mut run, &input_paths(inputs, cfg))?;
    let outcome = pipeline(&mut run, &d, allow_warnings, cfg);
    run.finish("manifest.json")?;
    outcome
}

fn pipeline(run: &mut Run, d: &trendscape::dataset::Dataset, allow_warnings: bool, cfg: &PipelineConfig) -> Result<()> {
    run.stage("ingest", |s| ingest_stage(s, d, allow_warnings))?;
    require_valid(d)?;
    check_k(d, cfg).map_err(CliError::stage("cluster"))?;
    run.stage("eda", |s| eda_stage(s, d))?;
    let sax = run.stage("sax", |s| symbolic_stage(s, d, cfg, Representation::Sax))?;
    let esax = run.stage("esax", |s| symbolic_stage(s, d, cfg, Representation::Esax))?;
    let diagrams: Vec<SeriesDiagrams> = run.stage("tda", |s| tda_stage(s, d, cfg))?;
    let mut rows = Vec::new();
    for rep in Representation::ALL {
        for method in [Method::KMeans, Method::Ward] {
            let tag = run_tag(rep, method);
            rows.extend(run.stage(&format!("cluster_{tag}"), |s| {
                let m = match rep {
                    Representation::Sax => sax.clone(),
                    Representation::Esax => esax.clone(),
                    Representation::Tda => {
                        tda_matrix(&diagrams, cfg, cfg.strategy_for(method)).map_err(s.fail())?
                    }
                };
                cluster_stage(s, d, &m, cfg, rep, method)
            })?);
        }
    }
    run.stage("report", |s| report_stage(s, &rows))?;
    for r in &rows {
        println!("{} {} {} {}", r.method.name(), r.representation, r.metric.name(), r.value);
    }
    Ok(())
}
