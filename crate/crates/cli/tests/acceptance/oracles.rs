//! Direct-definition reference implementations, independent of the library.

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Per degree 0 and 1: sorted finite pairs with positive persistence and the
/// number of essential classes, read off the ranks of lower-left submatrices
/// of the full boundary matrix over GF(2).
pub fn brute_force_diagrams(points: &[Vec<f64>], radius: f64) -> Vec<(Vec<(f64, f64)>, usize)> {
    let n = points.len();
    assert!(n <= 6);
    let mut cells: Vec<(Vec<usize>, f64)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if verts.len() > 3 {
            continue;
        }
        let diam = verts
            .iter()
            .flat_map(|a| verts.iter().map(move |b| (a, b)))
            .map(|(a, b)| dist(&points[*a], &points[*b]))
            .fold(0.0, f64::max);
        if diam <= radius {
            cells.push((verts, diam));
        }
    }
    cells.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.len().cmp(&b.0.len()))
            .then_with(|| b.0.cmp(&a.0))
    });
    let boundary: Vec<u64> = cells
        .iter()
        .map(|(verts, _)| {
            let mut col = 0u64;
            if verts.len() > 1 {
                for skip in 0..verts.len() {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, v)| *v)
                        .collect();
                    col |= 1 << cells.iter().position(|c| c.0 == face).unwrap();
                }
            }
            col
        })
        .collect();
    let rank = |i: usize, j: isize| -> usize {
        if j < 0 {
            return 0;
        }
        let row_mask = if i >= 64 { 0 } else { !0u64 << i };
        let mut cols: Vec<u64> = (0..=j as usize).map(|c| boundary[c] & row_mask).collect();
        let mut r = 0;
        for bit in 0..64 {
            if let Some(p) = cols.iter().position(|c| c & (1 << bit) != 0) {
                let pivot = cols.swap_remove(p);
                for c in cols.iter_mut() {
                    if *c & (1 << bit) != 0 {
                        *c ^= pivot;
                    }
                }
                r += 1;
            }
        }
        r
    };
    let m = cells.len();
    let dims: Vec<usize> = cells.iter().map(|c| c.0.len() - 1).collect();
    let mut out = vec![(Vec::new(), 0usize); 2];
    let mut paired = vec![false; m];
    for j in 0..m {
        for i in 0..j {
            let ji = j as isize;
            let mu = rank(i, ji) + rank(i + 1, ji - 1) - rank(i + 1, ji) - rank(i, ji - 1);
            if mu == 1 {
                paired[i] = true;
                paired[j] = true;
                if dims[i] < 2 && cells[j].1 > cells[i].1 {
                    out[dims[i]].0.push((cells[i].1, cells[j].1));
                }
            }
        }
    }
    for i in 0..m {
        if !paired[i] && dims[i] < 2 {
            out[dims[i]].1 += 1;
        }
    }
    for d in out.iter_mut() {
        d.0.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    out
}

/// Connected components of the graph joining points at distance `<= r`.
pub fn components(points: &[Vec<f64>], r: f64) -> usize {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    // relabel to the minimum until nothing changes
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if dist(&points[i], &points[j]) <= r && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    label.sort();
    label.dedup();
    label.len()
}

/// `k`-th largest (1-based) tent height at `t`.
pub fn landscape_value(pairs: &[(f64, f64)], k: usize, t: f64) -> f64 {
    let mut h: Vec<f64> = pairs.iter().map(|&(b, d)| (t - b).min(d - t).max(0.0)).collect();
    h.sort_by(|a, b| b.total_cmp(a));
    h.get(k - 1).copied().unwrap_or(0.0)
}

fn centroid(rows: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; rows[0].len()];
    for &i in members {
        for (s, v) in c.iter_mut().zip(&rows[i]) {
            *s += v;
        }
    }
    c.iter().map(|s| s / members.len() as f64).collect()
}

fn groups(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut ids = labels.to_vec();
    ids.sort();
    ids.dedup();
    ids.iter()
        .map(|&c| (0..labels.len()).filter(|&j| labels[j] == c).collect())
        .collect()
}

/// Mean silhouette; singletons score 0.
pub fn silhouette(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let g = groups(labels);
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        let mean_to = |members: &[usize]| {
            let others: Vec<usize> = members.iter().copied().filter(|&j| j != i).collect();
            others.iter().map(|&j| dist(&rows[i], &rows[j])).sum::<f64>() / others.len() as f64
        };
        let own = g.iter().find(|m| m.contains(&i)).unwrap();
        if own.len() == 1 {
            continue;
        }
        let a = mean_to(own);
        let b = g
            .iter()
            .filter(|m| !m.contains(&i))
            .map(|m| mean_to(m))
            .fold(f64::INFINITY, f64::min);
        if a.max(b) > 0.0 {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

pub fn davies_bouldin(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let g = groups(labels);
    let cents: Vec<Vec<f64>> = g.iter().map(|m| centroid(rows, m)).collect();
    let s: Vec<f64> = g
        .iter()
        .zip(&cents)
        .map(|(m, c)| m.iter().map(|&i| dist(&rows[i], c)).sum::<f64>() / m.len() as f64)
        .collect();
    let k = g.len();
    (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| j != i)
                .map(|j| (s[i] + s[j]) / dist(&cents[i], &cents[j]))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum::<f64>()
        / k as f64
}
