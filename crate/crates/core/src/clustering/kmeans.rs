use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{canonical_labels, centroids_of, squared_distance, ClusteringResult, FeatureMatrix, Method};
use crate::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_ITERATIONS: usize = 300;

struct Run {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    inertia: f64,
    trace: Vec<f64>,
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, cen)| (c, squared_distance(row, cen)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn inertia(m: &FeatureMatrix, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    m.rows()
        .zip(labels)
        .map(|(r, &l)| squared_distance(r, &centroids[l]))
        .sum()
}

/// k-means++: first centre uniform, then proportional to squared distance
/// from the nearest chosen centre.
fn plus_plus(m: &FeatureMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = m.n_rows();
    let mut centroids = vec![m.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = m.rows().map(|r| squared_distance(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if *w > 0.0 && target < *w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            // rounding can run off the end; take the last positive weight
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|w| *w > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = m.row(pick).to_vec();
        for (r, d) in m.rows().zip(d2.iter_mut()) {
            *d = d.min(squared_distance(r, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Moves the point farthest from its centroid (taken from a cluster with
/// more than one member) into each empty cluster.
fn repair_empty(m: &FeatureMatrix, labels: &mut [usize], centroids: &mut Vec<Vec<f64>>) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        let Some(empty) = counts.iter().position(|c| *c == 0) else {
            return;
        };
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .map(|i| (i, squared_distance(m.row(i), &centroids[labels[i]])))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        let Some((i, _)) = far else { return };
        labels[i] = empty;
        *centroids = centroids_of(m, labels, k);
    }
}

fn lloyd(m: &FeatureMatrix, init: Vec<Vec<f64>>) -> Run {
    let k = init.len();
    let mut labels: Vec<usize> = m.rows().map(|r| nearest(r, &init).0).collect();
    let mut centroids = centroids_of(m, &labels, k);
    repair_empty(m, &mut labels, &mut centroids);
    let mut trace = vec![inertia(m, &labels, &centroids)];
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<usize> = m
            .rows()
            .zip(&labels)
            .map(|(r, &cur)| {
                let (best, d) = nearest(r, &centroids);
                // keep the current cluster on ties so assignments settle
                if squared_distance(r, &centroids[cur]) <= d {
                    cur
                } else {
                    best
                }
            })
            .collect();
        if next == labels {
            break;
        }
        labels = next;
        centroids = centroids_of(m, &labels, k);
        repair_empty(m, &mut labels, &mut centroids);
        trace.push(inertia(m, &labels, &centroids));
    }
    Run {
        inertia: *trace.last().expect("nonempty trace"),
        labels,
        centroids,
        trace,
    }
}

fn check_k(m: &FeatureMatrix, k: usize) -> Result<()> {
    if k == 0 || k > m.n_rows() {
        return Err(Error::InvalidK { k, n: m.n_rows() });
    }
    Ok(())
}

fn restarts_runs(m: &FeatureMatrix, k: usize, seed: u64, restarts: usize) -> Vec<Run> {
    (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(m, plus_plus(m, k, &mut rng))
        })
        .collect()
}

/// Lowest inertia wins; earlier candidates win ties.
fn best(runs: Vec<Run>) -> Run {
    runs.into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one run")
}

fn finish(run: Run, k: usize) -> ClusteringResult {
    let (labels, order) = canonical_labels(&run.labels);
    let centroids = order.iter().map(|&o| run.centroids[o].clone()).collect();
    ClusteringResult {
        labels,
        k,
        method: Method::KMeans,
        inertia: Some(run.inertia),
        inertia_trace: run.trace,
        centroids,
        merge_history: Vec::new(),
    }
}

/// Lloyd's algorithm from `restarts` k-means++ seedings; each restart draws
/// from its own stream of a ChaCha generator seeded with `seed`.
pub fn kmeans(m: &FeatureMatrix, k: usize, seed: u64, restarts: usize) -> Result<ClusteringResult> {
    check_k(m, k)?;
    Ok(finish(best(restarts_runs(m, k, seed, restarts)), k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve {
    pub points: Vec<(usize, f64)>,
    /// `k` maximising the discrete second difference of inertia.
    pub knee: Option<usize>,
}

/// Best inertia for every `k` in `k_range`.
///
/// Besides the k-means++ restarts, each `k` after the first is also started
/// from the previous solution plus the point farthest from its centroid,
/// which makes the curve nonincreasing.
pub fn elbow_curve(
    m: &FeatureMatrix,
    k_range: RangeInclusive<usize>,
    seed: u64,
    restarts: usize,
) -> Result<ElbowCurve> {
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty k range {lo}..={hi}")));
    }
    check_k(m, lo)?;
    check_k(m, hi)?;
    let mut points = Vec::new();
    let mut prev: Option<Run> = None;
    for k in k_range {
        let mut runs = Vec::new();
        if let Some(p) = &prev {
            let far = m
                .rows()
                .zip(&p.labels)
                .map(|(r, &l)| squared_distance(r, &p.centroids[l]))
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (i, d)| if d > b.1 { (i, d) } else { b })
                .0;
            let mut init = p.centroids.clone();
            init.push(m.row(far).to_vec());
            runs.push(lloyd(m, init));
        }
        runs.extend(restarts_runs(m, k, seed, restarts));
        let run = best(runs);
        points.push((k, run.inertia));
        prev = Some(run);
    }
    let knee = (1..points.len().saturating_sub(1))
        .map(|i| (points[i].0, points[i - 1].1 - 2.0 * points[i].1 + points[i + 1].1))
        .fold(None, |best: Option<(usize, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .map(|(k, _)| k);
    Ok(ElbowCurve { points, knee })
}
