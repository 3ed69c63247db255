//! K-means and Ward clustering over generic feature matrices, elbow
//! analysis and internal evaluation scores.

mod kmeans;
mod metrics;
mod ward;

pub use kmeans::{elbow_curve, kmeans, ElbowCurve, DEFAULT_RESTARTS, MAX_ITERATIONS};
pub use metrics::{davies_bouldin, evaluate, silhouette, EvaluationScores};
pub use ward::{ward_cluster, Merge};

use crate::{Error, Result};

/// Default number of clusters for every pipeline run.
pub const DEFAULT_K: usize = 6;

/// `n` rows of `m` finite features each, with one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    labels: Vec<String>,
    data: Vec<f64>,
    n_features: usize,
}

impl FeatureMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a feature matrix needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        if labels.len() != rows.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} rows",
                labels.len(),
                rows.len()
            )));
        }
        let n_features = rows[0].len();
        if n_features == 0 || rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::InvalidArgument(
                "rows must be nonempty and of equal length".into(),
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite feature value".into()));
        }
        Ok(Self {
            labels,
            data: rows.concat(),
            n_features,
        })
    }

    /// Rows labelled `0..n`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(labels, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.n_features
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_features)
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    KMeans,
    Ward,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::KMeans => "KMEANS",
            Method::Ward => "WARD",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "KMEANS" => Ok(Method::KMeans),
            "WARD" | "HIERARCHICAL" => Ok(Method::Ward),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Cluster id per row, numbered `0..k` in order of first appearance.
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: Method,
    /// Within-cluster sum of squares (k-means only).
    pub inertia: Option<f64>,
    /// Inertia after every Lloyd update of the winning restart.
    pub inertia_trace: Vec<f64>,
    pub centroids: Vec<Vec<f64>>,
    /// Ward merges in order (empty for k-means).
    pub merge_history: Vec<Merge>,
}

impl ClusteringResult {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Renumbers arbitrary cluster ids to `0..k` by first appearance.
pub(crate) fn canonical_labels(raw: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = Vec::new();
    let labels = raw
        .iter()
        .map(|r| match order.iter().position(|o| o == r) {
            Some(p) => p,
            None => {
                order.push(*r);
                order.len() - 1
            }
        })
        .collect();
    (labels, order)
}

pub(crate) fn centroids_of(m: &FeatureMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; m.n_features()]; k];
    let mut counts = vec![0usize; k];
    for (row, &l) in m.rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (s, c) in sums.iter_mut().zip(&counts) {
        if *c > 0 {
            s.iter_mut().for_each(|v| *v /= *c as f64);
        }
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_validation() {
        assert!(FeatureMatrix::from_rows(vec![vec![1.0]]).is_err());
        assert!(FeatureMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(FeatureMatrix::from_rows(vec![vec![f64::NAN], vec![1.0]]).is_err());
        let m = FeatureMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!((m.n_rows(), m.n_features()), (2, 2));
        assert_eq!(m.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn canonical_relabel() {
        assert_eq!(canonical_labels(&[5, 5, 2, 9, 2]).0, vec![0, 0, 1, 2, 1]);
    }

    #[test]
    fn method_names() {
        assert_eq!("kmeans".parse::<Method>().unwrap(), Method::KMeans);
        assert_eq!("WARD".parse::<Method>().unwrap(), Method::Ward);
        assert!("dbscan".parse::<Method>().is_err());
    }
}
