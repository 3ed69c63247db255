use super::{canonical_labels, centroids_of, squared_distance, ClusteringResult, FeatureMatrix, Method};
use crate::{Error, Result};

/// Clusters `a` and `b` merged at `height`. Ids below `n` are rows; the
/// cluster created by merge `s` has id `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    /// Increase in within-cluster sum of squares caused by the merge.
    pub height: f64,
    pub size: usize,
}

/// Agglomerative Ward clustering down to `k` clusters.
///
/// Dissimilarities start as squared Euclidean distances and follow the
/// Lance–Williams Ward recurrence, under which `d(A, B)` equals twice the
/// SSE increase of merging `A` and `B`. Ties go to the lexicographically
/// smallest pair of cluster ids.
pub fn ward_cluster(m: &FeatureMatrix, k: usize) -> Result<ClusteringResult> {
    let n = m.n_rows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = squared_distance(m.row(i), m.row(j));
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    // slot i holds a live cluster while ids[i] is Some
    let mut ids: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut sizes = vec![1usize; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(n - k);

    for step in 0..(n - k) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..n {
            let Some(id_i) = ids[i] else { continue };
            for j in (i + 1)..n {
                let Some(id_j) = ids[j] else { continue };
                let (lo, hi) = (id_i.min(id_j), id_i.max(id_j));
                let cand = (d[i * n + j], lo, hi, i, j);
                let better = match best {
                    None => true,
                    Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (lo, hi) < (b.1, b.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (dab, lo, hi, a, b) = best.expect("more than k live clusters");
        let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
        for x in 0..n {
            if x == a || x == b || ids[x].is_none() {
                continue;
            }
            let nx = sizes[x] as f64;
            let v = ((na + nx) * d[a * n + x] + (nb + nx) * d[b * n + x] - nx * dab)
                / (na + nb + nx);
            d[a * n + x] = v;
            d[x * n + a] = v;
        }
        sizes[a] += sizes[b];
        ids[a] = Some(n + step);
        ids[b] = None;
        owner.iter_mut().filter(|o| **o == b).for_each(|o| *o = a);
        history.push(Merge {
            a: lo,
            b: hi,
            height: dab / 2.0,
            size: sizes[a],
        });
    }

    let (labels, _) = canonical_labels(&owner);
    Ok(ClusteringResult {
        centroids: centroids_of(m, &labels, k),
        labels,
        k,
        method: Method::Ward,
        inertia: None,
        inertia_trace: Vec::new(),
        merge_history: history,
    })
}
