//! Scores files and the consolidated method × representation table.

use std::fmt;
use std::str::FromStr;

use trendscape::clustering::{EvaluationScores, Method};

use crate::run::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Sax,
    Esax,
    Tda,
}

impl Representation {
    pub const ALL: [Representation; 3] = [Representation::Sax, Representation::Esax, Representation::Tda];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Sax => "SAX",
            Representation::Esax => "eSAX",
            Representation::Tda => "TDA",
        }
    }

    /// Lower-case form used in file names.
    pub fn tag(self) -> &'static str {
        match self {
            Representation::Sax => "sax",
            Representation::Esax => "esax",
            Representation::Tda => "tda",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sax" => Ok(Representation::Sax),
            "esax" => Ok(Representation::Esax),
            "tda" => Ok(Representation::Tda),
            _ => Err(format!("unknown representation {s:?} (expected SAX, eSAX or TDA)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Silhouette,
    DaviesBouldin,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Silhouette, Metric::DaviesBouldin];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Silhouette => "silhouette",
            Metric::DaviesBouldin => "davies_bouldin",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRow {
    pub method: Method,
    pub representation: Representation,
    pub metric: Metric,
    pub value: f64,
}

pub const SCORES_HEADER: [&str; 4] = ["method", "representation", "metric", "value"];

pub fn scores_table(method: Method, rep: Representation, s: &EvaluationScores) -> Table {
    let mut t = Table::new(&SCORES_HEADER);
    for (metric, value) in [(Metric::Silhouette, s.silhouette), (Metric::DaviesBouldin, s.davies_bouldin)] {
        t.row([method.name(), rep.name(), metric.name(), &num(value)]);
    }
    t
}

/// Parses a scores file written by `cluster`.
pub fn parse_scores_csv(text: &str) -> Result<Vec<ScoreRow>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(SCORES_HEADER) {
        return Err(format!("expected header {:?}", SCORES_HEADER.join(",")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| format!("line {line}: {what}");
        let method: Method = record[0].parse().map_err(|_| bad("bad method"))?;
        let representation: Representation = record[1].parse().map_err(|e: String| bad(&e))?;
        let metric: Metric = record[2].parse().map_err(|e: String| bad(&e))?;
        let value: f64 = record[3].parse().map_err(|_| bad("bad value"))?;
        if !value.is_finite() {
            return Err(bad("non-finite value"));
        }
        rows.push(ScoreRow {
            method,
            representation,
            metric,
            value,
        });
    }
    if rows.is_empty() {
        return Err("no score rows".into());
    }
    Ok(rows)
}

/// Rows are (method, metric), columns SAX, eSAX, TDA; missing runs stay blank.
pub fn comparison_table(rows: &[ScoreRow]) -> Table {
    let mut header = vec!["method", "metric"];
    header.extend(Representation::ALL.iter().map(|r| r.name()));
    let mut t = Table::new(&header);
    for method in [Method::KMeans, Method::Ward] {
        for metric in Metric::ALL {
            let mut fields = vec![method.name().to_string(), metric.name().to_string()];
            for rep in Representation::ALL {
                let cell = rows
                    .iter()
                    .rev()
                    .find(|r| r.method == method && r.metric == metric && r.representation == rep)
                    .map_or(String::new(), |r| num(r.value));
                fields.push(cell);
            }
            t.row(fields);
        }
    }
    t
}
