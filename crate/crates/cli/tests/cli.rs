use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use trendscape::clustering::Method;
use trendscape::dataset::{archetype_dataset, Dataset, TimeSeries};
use trendscape::topology::{compute_diagrams, TdaStrategy};
use trendscape_cli::commands::tda_matrix;
use trendscape_cli::config::{Overrides, PipelineConfig};

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["trendscape"];
    full.extend_from_slice(args);
    trendscape_cli::main_with_args(full)
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_trendscape"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// One Google Trends style export file per series.
fn write_exports(d: &Dataset, dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    for ts in d.series() {
        let mut text = format!("Category: All categories\n\nWeek,{}: (Worldwide)\n", ts.keyword());
        for (date, v) in ts.timestamps().iter().zip(ts.values()) {
            let cell = if *v < 1.0 { "<1".to_string() } else { format!("{}", v.round()) };
            text.push_str(&format!("{date},{cell}\n"));
        }
        fs::write(dir.join(format!("{}.csv", ts.keyword())), text).unwrap();
    }
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn synthetic(tmp: &TempDir) -> PathBuf {
    let out = tmp.path().join("synth");
    assert_eq!(run(&["synth", "--out", s(&out), "--seed", "3"]), 0);
    out.join("synthetic.csv")
}

#[test]
fn ingest_twenty_exports() {
    let tmp = TempDir::new().unwrap();
    let exports = tmp.path().join("exports");
    write_exports(&archetype_dataset(262, 5).unwrap(), &exports);
    let out = tmp.path().join("out");
    assert_eq!(run(&["ingest", s(&exports), "--out", s(&out)]), 0);
    let rows = read_csv(&out.join("dataset.csv"));
    assert_eq!(rows.len(), 263);
    assert!(rows.iter().all(|r| r.len() == 21));
    assert_eq!(rows[0][0], "week");
    let validation = read_csv(&out.join("validation.csv"));
    assert_eq!(validation.len(), 21);
    assert!(validation[1..].iter().all(|r| r[2] == "true" && r[3] == "true" && r[4] == "0"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest_ingest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 20);
    assert_eq!(manifest["config"]["k"], 6);
}

#[test]
fn ingest_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let (code, err) = binary(&["ingest", s(&empty), "--out", s(&tmp.path().join("o1"))]);
    assert_eq!(code, 2);
    assert!(err.contains("no data rows"), "{err}");

    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    fs::write(&a, "Week,x: (US)\n2020-01-05,1\n2020-01-12,2\n").unwrap();
    fs::write(&b, "Week,y: (US)\n2021-01-03,1\n2021-01-10,2\n").unwrap();
    let (code, err) = binary(&["ingest", s(&a), s(&b), "--out", s(&tmp.path().join("o2"))]);
    assert_eq!(code, 2);
    assert!(err.contains("alignment error"), "{err}");

    fs::write(&b, "Week,y: (US)\n2020-01-05,abc\n").unwrap();
    let (code, err) = binary(&["ingest", s(&b), "--out", s(&tmp.path().join("o3"))]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn validation_failures_respect_allow_warnings() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("gap.csv");
    // a missing cell and an 8-day gap
    fs::write(&f, "Week,x: (US)\n2020-01-05,1\n2020-01-12,\n2020-01-20,4\n").unwrap();
    let out = tmp.path().join("o");
    assert_eq!(run(&["ingest", s(&f), "--out", s(&out)]), 2);
    let v = read_csv(&out.join("validation.csv"));
    assert_eq!(v[1], ["x", "3", "true", "false", "1", "true", "false"]);
    assert_eq!(run(&["ingest", s(&f), "--out", s(&out), "--allow-warnings"]), 0);
    assert_eq!(run(&["eda", s(&f), "--out", s(&out)]), 2);
}

#[test]
fn eda_reports() {
    let tmp = TempDir::new().unwrap();
    let data = synthetic(&tmp);
    let out = tmp.path().join("eda");
    assert_eq!(run(&["eda", s(&data), "--out", s(&out)]), 0);
    let corr = read_csv(&out.join("eda_correlation.csv"));
    assert_eq!(corr.len(), 21);
    for i in 1..21 {
        assert_eq!(corr[i].len(), 21);
        assert_eq!(corr[i][i], "1");
        for j in 1..21 {
            assert_eq!(corr[i][j], corr[j][i]);
        }
    }
    let summary = read_csv(&out.join("eda_summary.csv"));
    assert_eq!(summary[0], ["keyword", "count", "mean", "std", "min", "q25", "median", "q75", "max"]);
    assert!(summary[1..].iter().all(|r| r[1] == "262"));
    assert_eq!(read_csv(&out.join("eda_adf.csv")).len(), 21);
    assert_eq!(read_csv(&out.join("eda_rolling.csv")).len(), 1 + 20 * 262);

    let before: Vec<Vec<u8>> = ["eda_summary.csv", "eda_correlation.csv", "eda_ks.csv", "eda_adf.csv"]
        .iter()
        .map(|f| fs::read(out.join(f)).unwrap())
        .collect();
    assert_eq!(run(&["eda", s(&data), "--out", s(&out)]), 0);
    for (f, b) in ["eda_summary.csv", "eda_correlation.csv", "eda_ks.csv", "eda_adf.csv"].iter().zip(before) {
        assert_eq!(fs::read(out.join(f)).unwrap(), b, "{f}");
    }
}

#[test]
fn constant_series_is_marked() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("flat.csv");
    let mut text = String::from("Week,flat: (US),wavy: (US)\n");
    let axis = trendscape::dataset::weekly_axis(trendscape::dataset::default_start(), 30);
    for (i, d) in axis.iter().enumerate() {
        text.push_str(&format!("{d},50,{}\n", 50 + (i % 7) * 3));
    }
    fs::write(&f, text).unwrap();
    let out = tmp.path().join("o");
    assert_eq!(run(&["eda", s(&f), "--out", s(&out)]), 0);
    let ks = read_csv(&out.join("eda_ks.csv"));
    assert_eq!(ks[1], ["flat", "", "", "", "DegenerateSample"]);
    assert_eq!(ks[2][4], "");
    let corr = read_csv(&out.join("eda_correlation.csv"));
    assert_eq!(corr[1], ["flat", "", ""]);
}

#[test]
fn symbolic_word_dumps() {
    let tmp = TempDir::new().unwrap();
    let data = synthetic(&tmp);
    let out = tmp.path().join("w");
    assert_eq!(run(&["sax", s(&data), "--out", s(&out)]), 0);
    assert_eq!(run(&["esax", s(&data), "--out", s(&out), "--alphabet", "5"]), 0);
    let sax = read_csv(&out.join("words_sax.csv"));
    assert_eq!(sax[0], ["keyword", "window_index", "word"]);
    assert_eq!(sax.len(), 1 + 20 * 211);
    assert_eq!(sax[1][1], "0");
    assert_eq!(sax[211][1], "210");
    assert_eq!(sax[1][2].len(), 12);
    let esax = read_csv(&out.join("words_esax.csv"));
    assert_eq!(esax[1][2].len(), 36);
    assert!(esax[1..].iter().all(|r| r[2].chars().all(|c| ('a'..='e').contains(&c))));
    assert_eq!(run(&["sax", s(&data), "--out", s(&out), "--window", "300"]), 2);
}

#[test]
fn cluster_sax_ward_and_errors() {
    let tmp = TempDir::new().unwrap();
    let data = synthetic(&tmp);
    let out = tmp.path().join("c");
    assert_eq!(run(&["cluster", s(&data), "-r", "sax", "-m", "ward", "--out", s(&out)]), 0);
    let members = read_csv(&out.join("members_sax_ward.csv"));
    assert_eq!(members.len(), 7);
    assert!(members[1..].iter().all(|r| r[1].parse::<usize>().unwrap() > 0));
    let scores = read_csv(&out.join("scores_sax_ward.csv"));
    assert_eq!(scores.len(), 3);
    assert_eq!(scores[1][..3], ["WARD", "SAX", "silhouette"]);
    assert_eq!(scores[2][..3], ["WARD", "SAX", "davies_bouldin"]);
    let labels = read_csv(&out.join("clusters_sax_ward.csv"));
    assert_eq!(labels[0], ["keyword", "method", "representation", "cluster_id"]);
    assert_eq!(labels.len(), 21);
    assert_eq!(read_csv(&out.join("merges_sax_ward.csv")).len(), 1 + 20 - 6);
    assert_eq!(read_csv(&out.join("plot_sax_ward.csv")).len(), 1 + 20 * 262);

    let (code, err) = binary(&["cluster", s(&data), "-r", "sax", "-m", "kmeans", "--k", "21", "--out", s(&out)]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid k = 21"), "{err}");
    let (code, _) = binary(&["cluster", s(&data), "-r", "pca", "-m", "kmeans", "--out", s(&out)]);
    assert_eq!(code, 2);
}

#[test]
fn tda_feature_lengths() {
    let d = archetype_dataset(120, 1).unwrap();
    let cfg = PipelineConfig::default();
    let diagrams = compute_diagrams(&d, &cfg.tda_params()).unwrap();
    let h1 = tda_matrix(&diagrams, &cfg, TdaStrategy::H1Only).unwrap();
    assert_eq!(h1.n_features(), 500);
    let both = tda_matrix(&diagrams, &cfg, cfg.strategy_for(Method::Ward)).unwrap();
    assert_eq!(both.n_features(), 1000);
}

#[test]
fn tda_command_writes_diagrams_and_landscapes() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("small.csv");
    let d = archetype_dataset(80, 2).unwrap();
    fs::write(&f, trendscape::dataset::to_canonical_csv(&d)).unwrap();
    let out = tmp.path().join("t");
    assert_eq!(run(&["tda", s(&f), "--out", s(&out), "--strategy", "h1_only", "--kmax", "3", "--grid", "10"]), 0);
    let diagrams = read_csv(&out.join("diagrams.csv"));
    assert_eq!(diagrams[0], ["keyword", "dim", "birth", "death", "essential"]);
    // each connected cloud keeps exactly one essential H0 class
    let essential_h0 = diagrams.iter().filter(|r| r[1] == "0" && r[4] == "true").count();
    assert_eq!(essential_h0, 20);
    let l = read_csv(&out.join("landscapes_h1_only_h1.csv"));
    assert_eq!(l[0], ["keyword", "level", "t", "value"]);
    assert_eq!(l.len(), 1 + 20 * 3 * 10);
    assert!(!out.join("landscapes_h0_h1_filtered_h0.csv").exists());
}

#[test]
fn report_grid() {
    let tmp = TempDir::new().unwrap();
    let data = synthetic(&tmp);
    let out = tmp.path().join("r");
    assert_eq!(run(&["report", s(&out)]), 2);
    assert_eq!(run(&["cluster", s(&data), "-r", "esax", "-m", "kmeans", "--out", s(&out)]), 0);
    assert_eq!(run(&["report", s(&out)]), 0);
    let t = read_csv(&out.join("comparison.csv"));
    assert_eq!(t[0], ["method", "metric", "SAX", "eSAX", "TDA"]);
    assert_eq!(t.len(), 5);
    assert!(!t[1][3].is_empty() && !t[2][3].is_empty());
    let filled: usize = t[1..].iter().map(|r| r[2..].iter().filter(|c| !c.is_empty()).count()).sum();
    assert_eq!(filled, 2);

    fs::write(out.join("scores_bad.csv"), "method,representation,metric,value\nWARD,SAX,silhouette,oops\n").unwrap();
    let (code, err) = binary(&["report", s(&out)]);
    assert_eq!(code, 2);
    assert!(err.contains("scores_bad.csv"), "{err}");
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = TempDir::new().unwrap();
    let data = synthetic(&tmp);
    let out = tmp.path().join("cfg");
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, format!("window = 26\nsegments = 13\nalphabet = 3\nout = {:?}\n", s(&out))).unwrap();
    assert_eq!(run(&["sax", s(&data), "--config", s(&cfg), "--alphabet", "6"]), 0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest_sax.json")).unwrap()).unwrap();
    let c = &manifest["config"];
    assert_eq!((c["window"].as_u64(), c["n_segments"].as_u64(), c["alphabet_size"].as_u64()), (Some(26), Some(13), Some(6)));
    assert_eq!(c["strategy"], "auto");
    let words = read_csv(&out.join("words_sax.csv"));
    assert_eq!(words.len(), 1 + 20 * (262 - 26 + 1));

    fs::write(&cfg, "windw = 26\n").unwrap();
    let (code, err) = binary(&["sax", s(&data), "--config", s(&cfg)]);
    assert_eq!(code, 2);
    assert!(err.contains("run.toml"), "{err}");
    assert_eq!(run(&["sax", s(&data), "--out", s(&out), "--segments", "0"]), 2);
}

#[test]
fn explicit_overrides_resolve() {
    let flags = Overrides {
        strategy: Some("H0_H1_FILTERED".into()),
        ..Default::default()
    };
    let c = PipelineConfig::resolve(flags, None).unwrap();
    assert_eq!(c.strategy_for(Method::KMeans), TdaStrategy::H0H1Filtered);
}

#[test]
fn synth_is_deterministic_and_parseable() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run(&["synth", "--out", s(&a), "--seed", "9", "--length", "100"]), 0);
    assert_eq!(run(&["synth", "--out", s(&b), "--seed", "9", "--length", "100"]), 0);
    let text = fs::read_to_string(a.join("synthetic.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(b.join("synthetic.csv")).unwrap());
    let d = trendscape::dataset::parse_trends_csv(&text).unwrap();
    assert_eq!((d.len(), d.time_axis().len()), (20, 100));
    assert!(d.series().iter().all(|s: &TimeSeries| s.values().iter().all(|v| (0.0..=100.0).contains(v))));
    assert_eq!(run(&["synth", "--out", s(&a), "--length", "1"]), 2);
}
