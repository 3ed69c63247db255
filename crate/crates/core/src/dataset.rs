//! Google Trends ingestion, alignment, validation and synthetic fixtures.
//!
//! Two CSV dialects are read by the same parser: the `multiTimeline` export
//! (an optional `Category: ...` preamble, then `Week,<term>: (<region>),...`)
//! and the canonical dataset file written by [`to_canonical_csv`]
//! (`week,<kw1>,<kw2>,...`, no preamble).

use std::collections::HashSet;
use std::f64::consts::PI;

use chrono::{Duration, NaiveDate};
use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Raw Google Trends interest scores live on this closed scale.
pub const VALUE_RANGE: (f64, f64) = (0.0, 100.0);

/// One keyword's weekly interest values. Missing cells are stored as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    keyword: String,
    timestamps: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(
        keyword: impl Into<String>,
        timestamps: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let keyword = keyword.into();
        check_keyword(&keyword)?;
        if timestamps.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "series `{keyword}` has {} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        Ok(Self {
            keyword,
            timestamps,
            values,
        })
    }

    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn renamed(mut self, keyword: impl Into<String>) -> Result<Self> {
        let keyword = keyword.into();
        check_keyword(&keyword)?;
        self.keyword = keyword;
        Ok(self)
    }

    fn restricted(&self, from: NaiveDate, to: NaiveDate) -> Self {
        let (timestamps, values) = self
            .timestamps
            .iter()
            .zip(&self.values)
            .filter(|(d, _)| **d >= from && **d <= to)
            .map(|(d, v)| (*d, *v))
            .unzip();
        Self {
            keyword: self.keyword.clone(),
            timestamps,
            values,
        }
    }
}

/// Keywords are the header text before the first `:`, so a keyword can never
/// contain one; surrounding whitespace is likewise stripped on ingest.
fn check_keyword(keyword: &str) -> Result<()> {
    if keyword.is_empty() || keyword.trim() != keyword || keyword.contains(':') {
        return Err(Error::InvalidArgument(format!(
            "invalid keyword {keyword:?}"
        )));
    }
    Ok(())
}

/// A set of series sharing one weekly time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    time_axis: Vec<NaiveDate>,
    series: Vec<TimeSeries>,
}

impl Dataset {
    /// Every series must carry exactly `time_axis` and keywords must be unique.
    pub fn new(time_axis: Vec<NaiveDate>, series: Vec<TimeSeries>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &series {
            if !seen.insert(s.keyword.as_str()) {
                return Err(Error::DuplicateKeyword(s.keyword.clone()));
            }
            if s.timestamps != time_axis {
                return Err(Error::Alignment(format!(
                    "series `{}` does not share the dataset time axis",
                    s.keyword
                )));
            }
        }
        Ok(Self { time_axis, series })
    }

    pub fn from_series(series: Vec<TimeSeries>) -> Result<Self> {
        let axis = series
            .first()
            .map(|s| s.timestamps.clone())
            .ok_or(Error::EmptyDataset)?;
        Self::new(axis, series)
    }

    pub fn time_axis(&self) -> &[NaiveDate] {
        &self.time_axis
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn keywords(&self) -> Vec<&str> {
        self.series.iter().map(|s| s.keyword()).collect()
    }

    pub fn get(&self, keyword: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.keyword == keyword)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn record_line(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_cell(cell: &str, line: u64) -> Result<f64> {
    match cell {
        "<1" => Ok(0.0),
        "" => Ok(f64::NAN),
        _ => match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(parse_err(line, format!("non-numeric cell {cell:?}"))),
        },
    }
}

/// Parses a Google Trends `multiTimeline` export or a canonical dataset file.
///
/// Leading single-field records (the `Category: ...` preamble) are skipped;
/// the first record with two or more fields is the header. Cells reading
/// `<1` become 0 and empty cells become NaN (counted as missing by
/// [`validate`]).
pub fn parse_trends_csv(text: &str) -> Result<Dataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());

    let mut keywords: Option<Vec<String>> = None;
    let mut axis = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record_line(&record);
        let Some(keywords) = keywords.as_ref() else {
            if record.len() < 2 {
                continue;
            }
            let kws = record
                .iter()
                .skip(1)
                .map(|h| {
                    let kw = h.split(':').next().unwrap_or("").trim().to_string();
                    if kw.is_empty() {
                        Err(parse_err(line, format!("empty keyword in header cell {h:?}")))
                    } else {
                        Ok(kw)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let mut seen = HashSet::new();
            if let Some(dup) = kws.iter().find(|k| !seen.insert(k.as_str())) {
                return Err(Error::DuplicateKeyword(dup.clone()));
            }
            columns = vec![Vec::new(); kws.len()];
            keywords = Some(kws);
            continue;
        };
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != keywords.len() + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", keywords.len() + 1, record.len()),
            ));
        }
        let date = NaiveDate::parse_from_str(&record[0], DATE_FORMAT)
            .map_err(|_| parse_err(line, format!("malformed date {:?}", &record[0])))?;
        axis.push(date);
        for (col, cell) in columns.iter_mut().zip(record.iter().skip(1)) {
            col.push(parse_cell(cell, line)?);
        }
    }

    let keywords = keywords.ok_or(Error::EmptyDataset)?;
    if axis.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let series = keywords
        .into_iter()
        .zip(columns)
        .map(|(kw, values)| TimeSeries::new(kw, axis.clone(), values))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(axis, series)
}

/// Writes the canonical dataset CSV: `week,<kw1>,...` then one row per week.
/// Missing values are written as empty cells.
pub fn to_canonical_csv(d: &Dataset) -> String {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["week".to_string()];
    header.extend(d.series.iter().map(|s| s.keyword.clone()));
    w.write_record(&header).expect("in-memory write");
    for (i, date) in d.time_axis.iter().enumerate() {
        let mut row = vec![date.format(DATE_FORMAT).to_string()];
        row.extend(d.series.iter().map(|s| {
            let v = s.values[i];
            if v.is_nan() {
                String::new()
            } else {
                v.to_string()
            }
        }));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Unions the series of several datasets over their common date range.
pub fn merge(parts: &[Dataset]) -> Result<Dataset> {
    if parts.is_empty() || parts.iter().any(|p| p.time_axis.is_empty()) {
        return Err(Error::EmptyDataset);
    }
    let mut seen = HashSet::new();
    for s in parts.iter().flat_map(|p| &p.series) {
        if !seen.insert(s.keyword.as_str()) {
            return Err(Error::DuplicateKeyword(s.keyword.clone()));
        }
    }
    let from = parts.iter().map(|p| p.time_axis[0]).max().expect("nonempty");
    let to = parts
        .iter()
        .map(|p| *p.time_axis.last().expect("nonempty"))
        .min()
        .expect("nonempty");
    if from > to {
        return Err(Error::Alignment(format!(
            "date ranges do not overlap (latest start {from}, earliest end {to})"
        )));
    }
    let axis_of = |p: &Dataset| -> Vec<NaiveDate> {
        p.time_axis
            .iter()
            .copied()
            .filter(|d| *d >= from && *d <= to)
            .collect()
    };
    let axis = axis_of(&parts[0]);
    if let Some(bad) = parts.iter().skip(1).find(|p| axis_of(p) != axis) {
        return Err(Error::Alignment(format!(
            "weeks of `{}` do not line up with `{}` inside {from}..={to}",
            bad.keywords().join(","),
            parts[0].keywords().join(",")
        )));
    }
    let series = parts
        .iter()
        .flat_map(|p| &p.series)
        .map(|s| s.restricted(from, to))
        .collect();
    Dataset::new(axis, series)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesReport {
    pub keyword: String,
    pub length: usize,
    pub range_ok: bool,
    pub spacing_ok: bool,
    pub missing_count: usize,
}

impl SeriesReport {
    pub fn is_ok(&self) -> bool {
        self.range_ok && self.spacing_ok && self.missing_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub series: Vec<SeriesReport>,
    pub aligned: bool,
    pub duplicate_keywords: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.aligned && !self.duplicate_keywords && self.series.iter().all(SeriesReport::is_ok)
    }
}

fn weekly(timestamps: &[NaiveDate]) -> bool {
    timestamps
        .windows(2)
        .all(|w| w[1] - w[0] == Duration::days(7))
}

pub fn validate(d: &Dataset) -> ValidationReport {
    let (lo, hi) = VALUE_RANGE;
    let series = d
        .series
        .iter()
        .map(|s| SeriesReport {
            keyword: s.keyword.clone(),
            length: s.len(),
            range_ok: s
                .values
                .iter()
                .filter(|v| !v.is_nan())
                .all(|v| (lo..=hi).contains(v)),
            spacing_ok: weekly(&s.timestamps),
            missing_count: s.values.iter().filter(|v| v.is_nan()).count(),
        })
        .collect();
    let mut seen = HashSet::new();
    ValidationReport {
        series,
        aligned: d.series.iter().all(|s| s.timestamps == d.time_axis),
        duplicate_keywords: !d.series.iter().all(|s| seen.insert(&s.keyword)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seasonal {
    pub amplitude: f64,
    /// In weeks.
    pub period: f64,
    /// In radians.
    pub phase: f64,
}

/// A spike of `height` at week `time`, decaying geometrically by `decay`
/// per week afterwards (`decay = 0` is a single-week spike).
#[derive(Debug, Clone, PartialEq)]
pub struct Spike {
    pub time: usize,
    pub height: f64,
    pub decay: f64,
}

/// Additive recipe for a synthetic interest series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SyntheticSpec {
    pub base: f64,
    /// Interest units per week.
    pub trend_slope: f64,
    pub seasonal: Option<Seasonal>,
    pub spikes: Vec<Spike>,
    /// Standard deviation of i.i.d. Gaussian noise.
    pub noise_sigma: f64,
    /// Standard deviation of the steps of an added Gaussian random walk.
    pub walk_sigma: f64,
}

impl SyntheticSpec {
    pub fn constant(base: f64) -> Self {
        Self {
            base,
            ..Self::default()
        }
    }

    /// The noise-free part of the recipe at week `t`, before clipping.
    pub fn deterministic_value(&self, t: usize) -> f64 {
        let tf = t as f64;
        let mut v = self.base + self.trend_slope * tf;
        if let Some(s) = &self.seasonal {
            v += s.amplitude * (2.0 * PI * tf / s.period + s.phase).sin();
        }
        for spike in &self.spikes {
            if t >= spike.time {
                let age = (t - spike.time) as i32;
                v += spike.height * if age == 0 { 1.0 } else { spike.decay.powi(age) };
            }
        }
        v
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.base, self.trend_slope, self.noise_sigma, self.walk_sigma]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.noise_sigma < 0.0 || self.walk_sigma < 0.0 {
            return Err(Error::InvalidSpec("non-finite or negative component".into()));
        }
        if let Some(s) = &self.seasonal {
            if !(s.period > 0.0) || !s.amplitude.is_finite() || !s.phase.is_finite() {
                return Err(Error::InvalidSpec("seasonal period must be positive".into()));
            }
        }
        if self
            .spikes
            .iter()
            .any(|s| !s.height.is_finite() || !(0.0..1.0).contains(&s.decay))
        {
            return Err(Error::InvalidSpec("spike decay must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// First week of generated fixtures (a Sunday, as in Google Trends exports).
pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 4, 12).expect("valid date")
}

pub fn weekly_axis(start: NaiveDate, length: usize) -> Vec<NaiveDate> {
    (0..length)
        .map(|i| start + Duration::weeks(i as i64))
        .collect()
}

/// Generates a deterministic series named `synthetic` starting at
/// [`default_start`]; values are clipped to `[0, 100]` after composition.
pub fn generate_synthetic(spec: &SyntheticSpec, length: usize, seed: u64) -> Result<TimeSeries> {
    if length < 2 {
        return Err(Error::InvalidSpec(format!("length {length} < 2")));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma checked");
    let step = Normal::new(0.0, spec.walk_sigma).expect("sigma checked");
    let mut walk = 0.0;
    let values = (0..length)
        .map(|t| {
            let e = noise.sample(&mut rng);
            walk += step.sample(&mut rng);
            (spec.deterministic_value(t) + walk + e).clamp(VALUE_RANGE.0, VALUE_RANGE.1)
        })
        .collect();
    TimeSeries::new("synthetic", weekly_axis(default_start(), length), values)
}

/// Keywords of the two series generated as near-duplicates by
/// [`archetype_dataset`].
pub const NEAR_DUPLICATE_PAIR: (&str, &str) = ("seasonal_a", "seasonal_a_twin");

fn seasonal(amplitude: f64, period: f64, phase: f64) -> Option<Seasonal> {
    Some(Seasonal {
        amplitude,
        period,
        phase,
    })
}

fn archetype_specs(length: usize) -> Vec<(&'static str, SyntheticSpec)> {
    let l = length as f64;
    let at = |frac: f64| ((l * frac) as usize).min(length.saturating_sub(1));
    let spec = |base, trend_slope, seasonal, spikes, noise_sigma, walk_sigma| SyntheticSpec {
        base,
        trend_slope,
        seasonal,
        spikes,
        noise_sigma,
        walk_sigma,
    };
    let spike = |time, height, decay| Spike { time, height, decay };
    vec![
        // stable-seasonal
        ("seasonal_a", spec(50.0, 0.0, seasonal(25.0, 52.0, 0.0), vec![], 2.0, 0.0)),
        ("seasonal_b", spec(60.0, 0.0, seasonal(15.0, 52.0, PI / 2.0), vec![], 3.0, 0.0)),
        ("seasonal_c", spec(40.0, 0.0, seasonal(30.0, 52.0, PI), vec![], 2.0, 0.0)),
        ("seasonal_d", spec(70.0, 0.0, seasonal(10.0, 26.0, 0.0), vec![], 2.5, 0.0)),
        // trending
        ("trend_up_a", spec(10.0, 70.0 / l, None, vec![], 3.0, 0.0)),
        ("trend_up_b", spec(20.0, 60.0 / l, seasonal(5.0, 52.0, 0.0), vec![], 3.0, 0.0)),
        ("trend_up_c", spec(5.0, 85.0 / l, None, vec![], 5.0, 0.0)),
        ("trend_down_a", spec(90.0, -70.0 / l, None, vec![], 3.0, 0.0)),
        ("trend_down_b", spec(80.0, -50.0 / l, seasonal(5.0, 52.0, 1.0), vec![], 3.0, 0.0)),
        // spiky
        ("spike_a", spec(10.0, 0.0, None, vec![spike(at(0.3), 80.0, 0.6)], 2.0, 0.0)),
        ("spike_b", spec(15.0, 0.0, None, vec![spike(at(0.7), 75.0, 0.5)], 2.0, 0.0)),
        (
            "spike_c",
            spec(12.0, 0.0, None, vec![spike(at(0.2), 60.0, 0.7), spike(at(0.8), 70.0, 0.7)], 2.0, 0.0),
        ),
        ("spike_d", spec(20.0, 0.0, None, vec![spike(at(0.5), 70.0, 0.0)], 3.0, 0.0)),
        ("spike_e", spec(8.0, 0.0, None, vec![spike(at(0.9), 85.0, 0.8)], 1.5, 0.0)),
        // chaotic
        ("chaotic_a", spec(50.0, 0.0, None, vec![], 12.0, 3.0)),
        ("chaotic_b", spec(45.0, 0.0, None, vec![], 15.0, 2.0)),
        ("chaotic_c", spec(55.0, 0.0, seasonal(8.0, 13.0, 0.0), vec![], 10.0, 4.0)),
        ("chaotic_d", spec(40.0, 0.0, None, vec![], 18.0, 1.0)),
        ("chaotic_e", spec(50.0, 0.0, None, vec![], 8.0, 5.0)),
    ]
}

/// A 20-keyword fixture built from the stable-seasonal, trending, spiky and
/// chaotic archetypes, plus one near-duplicate of `seasonal_a`
/// (see [`NEAR_DUPLICATE_PAIR`]).
pub fn archetype_dataset(length: usize, seed: u64) -> Result<Dataset> {
    let mut series = Vec::new();
    for (i, (name, spec)) in archetype_specs(length).into_iter().enumerate() {
        let s = generate_synthetic(&spec, length, seed.wrapping_add(i as u64))?.renamed(name)?;
        if name == NEAR_DUPLICATE_PAIR.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7715_u64);
            let jitter = Normal::new(0.0, 0.5).expect("valid sigma");
            let values = s
                .values()
                .iter()
                .map(|v| (v + jitter.sample(&mut rng)).clamp(VALUE_RANGE.0, VALUE_RANGE.1))
                .collect();
            let twin = TimeSeries::new(NEAR_DUPLICATE_PAIR.1, s.timestamps().to_vec(), values)?;
            series.push(s);
            series.push(twin);
        } else {
            series.push(s);
        }
    }
    Dataset::from_series(series)
}
