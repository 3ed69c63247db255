use std::path::{Path, PathBuf};

use trendscape::clustering::{
    elbow_curve, evaluate, kmeans, ward_cluster, ClusteringResult, FeatureMatrix, Method,
};
use trendscape::dataset::{self, Dataset};
use trendscape::eda;
use trendscape::symbolic::{encode_features, sliding_words, WordKind, WordSequence};
use trendscape::topology::{
    compute_diagrams, feature_matrix_from_diagrams, landscape, SeriesDiagrams, TdaFeatureMatrix,
    TdaStrategy,
};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::report::{comparison_table, parse_scores_csv, scores_table, Representation, ScoreRow};
use crate::run::{num, Run, Stage, Table};

pub const DATASET_FILE: &str = "dataset.csv";
const ELBOW_K_MAX: usize = 10;

/// Expands directories to their `*.csv` files, sorted by name.
fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.is_file()
                        && f.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Reads, parses and merges every input, recording input digests.
pub fn load_dataset(run: &mut Run, paths: &[PathBuf]) -> Result<Dataset> {
    let files = expand_inputs(paths)?;
    if files.is_empty() {
        return Err(CliError::stage("ingest")(trendscape::Error::EmptyDataset));
    }
    let mut parts = Vec::with_capacity(files.len());
    for f in &files {
        let bytes = std::fs::read(f).map_err(|e| CliError::io(f, e))?;
        run.record_input(f, &bytes);
        let text = String::from_utf8(bytes).map_err(|_| CliError::BadFile {
            path: f.clone(),
            message: "not valid UTF-8".into(),
        })?;
        let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
        parts.push(dataset::parse_trends_csv(text).map_err(CliError::stage(format!("ingest {}", f.display())))?);
    }
    dataset::merge(&parts).map_err(CliError::stage("ingest"))
}

/// Inputs from the command line, else from the config file, else the
/// canonical dataset of an earlier `ingest` in the output directory.
pub fn input_paths(cli_paths: Vec<PathBuf>, cfg: &PipelineConfig) -> Vec<PathBuf> {
    if !cli_paths.is_empty() {
        cli_paths
    } else if !cfg.inputs.is_empty() {
        cfg.inputs.clone()
    } else {
        vec![cfg.out.join(DATASET_FILE)]
    }
}

fn validation_table(d: &Dataset) -> (Table, trendscape::dataset::ValidationReport) {
    let report = dataset::validate(d);
    let mut t = Table::new(&[
        "keyword",
        "length",
        "range_ok",
        "spacing_ok",
        "missing_count",
        "aligned",
        "duplicate_keywords",
    ]);
    for s in &report.series {
        t.row([
            s.keyword.clone(),
            s.length.to_string(),
            s.range_ok.to_string(),
            s.spacing_ok.to_string(),
            s.missing_count.to_string(),
            report.aligned.to_string(),
            report.duplicate_keywords.to_string(),
        ]);
    }
    (t, report)
}

fn problems(report: &trendscape::dataset::ValidationReport) -> String {
    let mut out: Vec<String> = report
        .series
        .iter()
        .filter(|s| !s.is_ok())
        .map(|s| {
            let mut what = Vec::new();
            if !s.range_ok {
                what.push("values outside [0, 100]".to_string());
            }
            if !s.spacing_ok {
                what.push("not weekly".to_string());
            }
            if s.missing_count > 0 {
                what.push(format!("{} missing", s.missing_count));
            }
            format!("{}: {}", s.keyword, what.join(", "))
        })
        .collect();
    if !report.aligned {
        out.push("series are not aligned".into());
    }
    if report.duplicate_keywords {
        out.push("duplicate keywords".into());
    }
    out.join("; ")
}

/// Writes the canonical dataset and validation report.
pub fn ingest_stage(stage: &mut Stage, d: &Dataset, allow_warnings: bool) -> Result<()> {
    stage.write(DATASET_FILE, dataset::to_canonical_csv(d).as_bytes())?;
    let (table, report) = validation_table(d);
    stage.write_csv("validation.csv", table)?;
    if !report.is_ok() && !allow_warnings {
        return Err(CliError::Validation(problems(&report)));
    }
    Ok(())
}

/// Downstream stages need complete, in-range weekly data.
pub fn require_valid(d: &Dataset) -> Result<()> {
    let report = dataset::validate(d);
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::Validation(problems(&report)))
    }
}

pub fn eda_stage(stage: &mut Stage, d: &Dataset) -> Result<()> {
    let mut summary = Table::new(&["keyword", "count", "mean", "std", "min", "q25", "median", "q75", "max"]);
    let mut ks = Table::new(&["keyword", "ks_statistic", "p_value", "reject_5pct", "note"]);
    let mut adf = Table::new(&[
        "keyword",
        "adf_statistic",
        "lags_used",
        "nobs",
        "critical_1pct",
        "critical_5pct",
        "critical_10pct",
        "stationary_5pct",
        "note",
    ]);
    let mut rolling = Table::new(&["keyword", "week", "value", "rolling_mean", "band_lower", "band_upper"]);
    let axis = d.time_axis();
    for s in d.series() {
        let kw = s.keyword();
        let st = eda::descriptive_stats(s.values()).map_err(stage.fail())?;
        summary.row([
            kw.to_string(),
            st.count.to_string(),
            num(st.mean),
            num(st.std),
            num(st.min),
            num(st.q25),
            num(st.median),
            num(st.q75),
            num(st.max),
        ]);
        match eda::ks_normality(s.values()) {
            Ok(r) => ks.row([kw, &num(r.statistic), &num(r.p_value), &r.reject_5pct.to_string(), ""]),
            Err(e) => ks.row([kw, "", "", "", marker(&e)]),
        }
        match eda::adf_test(s.values(), None) {
            Ok(r) => adf.row([
                kw,
                &num(r.statistic),
                &r.lags_used.to_string(),
                &r.nobs.to_string(),
                &num(r.critical_values.one_pct),
                &num(r.critical_values.five_pct),
                &num(r.critical_values.ten_pct),
                &r.reject_5pct.to_string(),
                "",
            ]),
            Err(e) => adf.row([kw, "", "", "", "", "", "", "", marker(&e)]),
        }
        let window = eda::DEFAULT_ROLLING_WINDOW;
        let bands = eda::rolling_stats(s.values(), window).ok();
        for (t, (date, v)) in axis.iter().zip(s.values()).enumerate() {
            let band = bands
                .as_ref()
                .filter(|_| t + 1 >= window)
                .map(|b| (b.means[t + 1 - window], b.stds[t + 1 - window]));
            let (m, lo, hi) = match band {
                Some((m, sd)) => (num(m), num(m - sd), num(m + sd)),
                None => Default::default(),
            };
            rolling.row([kw.to_string(), date.to_string(), num(*v), m, lo, hi]);
        }
    }
    let corr = eda::correlation_matrix(d).map_err(stage.fail())?;
    let mut header = vec!["keyword".to_string()];
    header.extend(corr.keywords.iter().cloned());
    let mut ct = Table::new(&header);
    for (kw, row) in corr.keywords.iter().zip(&corr.values) {
        let mut fields = vec![kw.clone()];
        fields.extend(row.iter().map(|v| v.map_or(String::new(), num)));
        ct.row(fields);
    }
    stage.write_csv("eda_summary.csv", summary)?;
    stage.write_csv("eda_correlation.csv", ct)?;
    stage.write_csv("eda_ks.csv", ks)?;
    stage.write_csv("eda_adf.csv", adf)?;
    stage.write_csv("eda_rolling.csv", rolling)
}

/// Short error tag for report cells.
fn marker(e: &trendscape::Error) -> &'static str {
    use trendscape::Error as E;
    match e {
        E::DegenerateSample(_) => "DegenerateSample",
        E::Numerical(_) => "Numerical",
        _ => "InvalidInput",
    }
}

fn word_kind(rep: Representation) -> WordKind {
    match rep {
        Representation::Esax => WordKind::Esax,
        _ => WordKind::Sax,
    }
}

pub fn words(d: &Dataset, cfg: &PipelineConfig, kind: WordKind) -> trendscape::Result<Vec<WordSequence>> {
    d.series()
        .iter()
        .map(|s| sliding_words(s, cfg.window, cfg.n_segments, cfg.alphabet(), kind))
        .collect()
}

/// Writes the word dump and returns the ordinal feature matrix.
pub fn symbolic_stage(
    stage: &mut Stage,
    d: &Dataset,
    cfg: &PipelineConfig,
    rep: Representation,
) -> Result<FeatureMatrix> {
    let seqs = words(d, cfg, word_kind(rep)).map_err(stage.fail())?;
    let mut dump = Table::new(&["keyword", "window_index", "word"]);
    for ws in &seqs {
        for (i, w) in ws.words.iter().enumerate() {
            dump.row([ws.keyword.clone(), i.to_string(), w.to_string()]);
        }
    }
    stage.write_csv(&format!("words_{}.csv", rep.tag()), dump)?;
    symbolic_matrix(&seqs).map_err(stage.fail())
}

pub fn symbolic_matrix(seqs: &[WordSequence]) -> trendscape::Result<FeatureMatrix> {
    let vectors = seqs.iter().map(encode_features).collect::<trendscape::Result<Vec<_>>>()?;
    FeatureMatrix::new(
        vectors.iter().map(|v| v.keyword.clone()).collect(),
        vectors.into_iter().map(|v| v.values).collect(),
    )
}

fn strategies(cfg: &PipelineConfig) -> Vec<TdaStrategy> {
    match cfg.strategy {
        Some(s) => vec![s],
        None => vec![TdaStrategy::H1Only, TdaStrategy::H0H1Filtered],
    }
}

fn strategy_tag(s: TdaStrategy) -> String {
    s.name().to_ascii_lowercase()
}

/// Writes diagrams and the landscapes of each applicable strategy; returns
/// the diagrams for reuse by clustering.
pub fn tda_stage(stage: &mut Stage, d: &Dataset, cfg: &PipelineConfig) -> Result<Vec<SeriesDiagrams>> {
    let params = cfg.tda_params();
    let diagrams = compute_diagrams(d, &params).map_err(stage.fail())?;
    let mut dump = Table::new(&["keyword", "dim", "birth", "death", "essential"]);
    for sd in &diagrams {
        for pd in &sd.diagrams {
            let dim = pd.dimension.to_string();
            for &(b, e) in &pd.pairs {
                dump.row([sd.keyword.as_str(), &dim, &num(b), &num(e), "false"]);
            }
            for &b in &pd.essential {
                dump.row([sd.keyword.as_str(), &dim, &num(b), "", "true"]);
            }
        }
    }
    stage.write_csv("diagrams.csv", dump)?;
    for strategy in strategies(cfg) {
        let fm = feature_matrix_from_diagrams(&diagrams, strategy, &params).map_err(stage.fail())?;
        for (degree, table) in landscape_tables(&diagrams, &fm, cfg).map_err(stage.fail())? {
            stage.write_csv(&format!("landscapes_{}_h{degree}.csv", strategy_tag(strategy)), table)?;
        }
    }
    Ok(diagrams)
}

/// One "keyword,level,t,value" table per homology degree used by `fm`.
fn landscape_tables(
    diagrams: &[SeriesDiagrams],
    fm: &TdaFeatureMatrix,
    cfg: &PipelineConfig,
) -> trendscape::Result<Vec<(usize, Table)>> {
    let mut tables: Vec<(usize, Table)> = Vec::new();
    for sd in diagrams {
        let used = TdaFeatureMatrix::used_diagrams(fm.strategy, sd, cfg.persistence_floor)?;
        for pd in used {
            let l = landscape(&pd, fm.k_max, fm.grid_size, fm.t_max)?;
            let idx = match tables.iter().position(|(deg, _)| *deg == pd.dimension) {
                Some(i) => i,
                None => {
                    tables.push((pd.dimension, Table::new(&["keyword", "level", "t", "value"])));
                    tables.len() - 1
                }
            };
            let table = &mut tables[idx].1;
            for (k, level) in l.values.iter().enumerate() {
                for (t, v) in l.grid.iter().zip(level) {
                    table.row([sd.keyword.clone(), (k + 1).to_string(), num(*t), num(*v)]);
                }
            }
        }
    }
    Ok(tables)
}

pub fn tda_matrix(
    diagrams: &[SeriesDiagrams],
    cfg: &PipelineConfig,
    strategy: TdaStrategy,
) -> trendscape::Result<FeatureMatrix> {
    let fm = feature_matrix_from_diagrams(diagrams, strategy, &cfg.tda_params())?;
    FeatureMatrix::new(fm.keywords, fm.rows)
}

pub fn check_k(d: &Dataset, cfg: &PipelineConfig) -> trendscape::Result<()> {
    if cfg.k > d.len() {
        return Err(trendscape::Error::InvalidK { k: cfg.k, n: d.len() });
    }
    Ok(())
}

pub fn run_tag(rep: Representation, method: Method) -> String {
    format!("{}_{}", rep.tag(), method.name().to_ascii_lowercase())
}

/// Clusters `m` and writes labels, scores, members, plot data and the
/// method's diagnostics.
pub fn cluster_stage(
    stage: &mut Stage,
    d: &Dataset,
    m: &FeatureMatrix,
    cfg: &PipelineConfig,
    rep: Representation,
    method: Method,
) -> Result<Vec<ScoreRow>> {
    let tag = run_tag(rep, method);
    let result = match method {
        Method::KMeans => kmeans(m, cfg.k, cfg.seed, cfg.restarts),
        Method::Ward => ward_cluster(m, cfg.k),
    }
    .map_err(stage.fail())?;
    let scores = evaluate(m, &result.labels).map_err(stage.fail())?;

    let mut labels = Table::new(&["keyword", "method", "representation", "cluster_id"]);
    for (kw, l) in m.labels().iter().zip(&result.labels) {
        labels.row([kw.as_str(), method.name(), rep.name(), &l.to_string()]);
    }
    stage.write_csv(&format!("clusters_{tag}.csv"), labels)?;
    stage.write_csv(&format!("scores_{tag}.csv"), scores_table(method, rep, &scores))?;
    stage.write_csv(&format!("members_{tag}.csv"), members_table(m, &result))?;
    stage.write_csv(&format!("plot_{tag}.csv"), plot_table(d, &result, rep))?;
    match method {
        Method::KMeans => {
            let hi = m.n_rows().min(ELBOW_K_MAX);
            let curve = elbow_curve(m, 1..=hi, cfg.seed, cfg.restarts).map_err(stage.fail())?;
            let mut t = Table::new(&["k", "inertia", "knee"]);
            for (k, inertia) in &curve.points {
                t.row([k.to_string(), num(*inertia), (curve.knee == Some(*k)).to_string()]);
            }
            stage.write_csv(&format!("elbow_{tag}.csv"), t)?;
            let mut t = Table::new(&["iteration", "inertia"]);
            for (i, v) in result.inertia_trace.iter().enumerate() {
                t.row([i.to_string(), num(*v)]);
            }
            stage.write_csv(&format!("inertia_{tag}.csv"), t)?;
        }
        Method::Ward => {
            let mut t = Table::new(&["step", "a", "b", "height", "size"]);
            for (i, mg) in result.merge_history.iter().enumerate() {
                t.row([i.to_string(), mg.a.to_string(), mg.b.to_string(), num(mg.height), mg.size.to_string()]);
            }
            stage.write_csv(&format!("merges_{tag}.csv"), t)?;
        }
    }
    Ok(vec![
        ScoreRow {
            method,
            representation: rep,
            metric: crate::report::Metric::Silhouette,
            value: scores.silhouette,
        },
        ScoreRow {
            method,
            representation: rep,
            metric: crate::report::Metric::DaviesBouldin,
            value: scores.davies_bouldin,
        },
    ])
}

fn members_table(m: &FeatureMatrix, r: &ClusteringResult) -> Table {
    let mut t = Table::new(&["cluster_id", "size", "keywords"]);
    for (c, members) in r.members().iter().enumerate() {
        let names: Vec<&str> = members.iter().map(|&i| m.labels()[i].as_str()).collect();
        t.row([c.to_string(), members.len().to_string(), names.join(";")]);
    }
    t
}

/// Per-cluster overlays: z-normalised series for the symbolic
/// representations, raw values for TDA.
fn plot_table(d: &Dataset, r: &ClusteringResult, rep: Representation) -> Table {
    let mut t = Table::new(&["cluster_id", "keyword", "week", "value"]);
    for (c, members) in r.members().iter().enumerate() {
        for &i in members {
            let s = &d.series()[i];
            let values = match rep {
                Representation::Tda => s.values().to_vec(),
                _ => eda::z_normalize(s.values()),
            };
            for (date, v) in s.timestamps().iter().zip(values) {
                t.row([c.to_string(), s.keyword().to_string(), date.to_string(), num(v)]);
            }
        }
    }
    t
}

/// Reads every `scores_*.csv` in `dir`.
pub fn collect_scores(dir: &Path) -> Result<Vec<ScoreRow>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("scores_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no cluster runs (scores_*.csv) found in {}",
            dir.display()
        )));
    }
    let mut rows = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| CliError::io(&f, e))?;
        rows.extend(parse_scores_csv(&text).map_err(|message| CliError::BadFile { path: f, message })?);
    }
    Ok(rows)
}

pub fn report_stage(stage: &mut Stage, rows: &[ScoreRow]) -> Result<()> {
    stage.write_csv("comparison.csv", comparison_table(rows))
}
