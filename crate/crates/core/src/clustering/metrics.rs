use std::collections::BTreeMap;

use super::{distance, FeatureMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationScores {
    pub silhouette: f64,
    pub davies_bouldin: f64,
}

/// Row indices per cluster id, ids ascending.
fn groups(m: &FeatureMatrix, labels: &[usize]) -> Result<Vec<Vec<usize>>> {
    if labels.len() != m.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} rows",
            labels.len(),
            m.n_rows()
        )));
    }
    let mut by_id: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_id.entry(l).or_default().push(i);
    }
    if by_id.len() < 2 {
        return Err(Error::UndefinedScore(
            "fewer than two clusters present".into(),
        ));
    }
    Ok(by_id.into_values().collect())
}

/// Mean silhouette `(b - a) / max(a, b)` over all rows with Euclidean
/// distances. Rows in singleton clusters, and rows with `a = b = 0`,
/// contribute 0.
pub fn silhouette(m: &FeatureMatrix, labels: &[usize]) -> Result<f64> {
    let clusters = groups(m, labels)?;
    let n = m.n_rows();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(m.row(i), m.row(j));
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut cluster_of = vec![0; n];
    for (c, members) in clusters.iter().enumerate() {
        members.iter().for_each(|&i| cluster_of[i] = c);
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = &clusters[cluster_of[i]];
        if own.len() == 1 {
            continue;
        }
        let mean_to = |members: &[usize]| {
            members.iter().map(|&j| dist[i * n + j]).sum::<f64>()
        };
        let a = mean_to(own) / (own.len() - 1) as f64;
        let b = clusters
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != cluster_of[i])
            .map(|(_, members)| mean_to(members) / members.len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Mean over clusters of the worst `(S_i + S_j) / |c_i - c_j|`, where `S_i`
/// is the mean distance of cluster `i`'s members to its centroid.
pub fn davies_bouldin(m: &FeatureMatrix, labels: &[usize]) -> Result<f64> {
    let clusters = groups(m, labels)?;
    let dim = m.n_features();
    let centroids: Vec<Vec<f64>> = clusters
        .iter()
        .map(|members| {
            let mut c = vec![0.0; dim];
            for &i in members {
                c.iter_mut().zip(m.row(i)).for_each(|(s, v)| *s += v);
            }
            c.iter_mut().for_each(|s| *s /= members.len() as f64);
            c
        })
        .collect();
    let scatter: Vec<f64> = clusters
        .iter()
        .zip(&centroids)
        .map(|(members, c)| {
            members.iter().map(|&i| distance(m.row(i), c)).sum::<f64>() / members.len() as f64
        })
        .collect();
    let ids: Vec<usize> = clusters.iter().map(|members| labels[members[0]]).collect();
    let k = clusters.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst: f64 = 0.0;
        for j in 0..k {
            if i == j {
                continue;
            }
            let sep = distance(&centroids[i], &centroids[j]);
            if sep == 0.0 {
                return Err(Error::UndefinedScore(format!(
                    "clusters {} and {} share a centroid",
                    ids[i.min(j)],
                    ids[i.max(j)]
                )));
            }
            worst = worst.max((scatter[i] + scatter[j]) / sep);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

pub fn evaluate(m: &FeatureMatrix, labels: &[usize]) -> Result<EvaluationScores> {
    Ok(EvaluationScores {
        silhouette: silhouette(m, labels)?,
        davies_bouldin: davies_bouldin(m, labels)?,
    })
}
