//! Rips persistence without materialising the filtration: H0 by union-find
//! over edges, H1 by reducing edge coboundaries (persistent cohomology) with
//! the H0 death edges cleared. Yields the same diagrams as
//! [`persistent_homology`](super::persistent_homology) on the corresponding
//! [`rips_filtration`](super::rips_filtration).

use std::cmp::Ordering;
use std::collections::HashMap;

use super::rips::distance_matrix;
use super::{PersistenceDiagram, PointCloud};
use crate::{Error, Result};

/// A triangle in filtration order: by diameter, then by colex index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cofacet {
    diameter: f64,
    index: u64,
}

impl Cofacet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then(self.index.cmp(&other.index))
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn choose3(n: u64) -> u64 {
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

/// Colex rank of `{a, b, c}`.
fn triangle_index(mut v: [u64; 3]) -> u64 {
    v.sort_unstable();
    choose3(v[2]) + choose2(v[1]) + v[0]
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

/// Symmetric difference of two lists sorted by descending filtration order.
fn xor_desc(a: &[Cofacet], b: &[Cofacet], out: &mut Vec<Cofacet>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match b[j].cmp(&a[i]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Degree-0 (and, for `max_dimension == 2`, degree-1) diagrams of the
/// Vietoris–Rips filtration of `c` truncated at `max_radius`.
pub fn rips_persistence(
    c: &PointCloud,
    max_dimension: usize,
    max_radius: f64,
) -> Result<Vec<PersistenceDiagram>> {
    if c.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(1..=2).contains(&max_dimension) {
        return Err(Error::InvalidArgument(format!(
            "max_dimension {max_dimension} not in 1..=2"
        )));
    }
    if !(max_radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max_radius {max_radius} must be positive"
        )));
    }
    let n = c.len();
    if n > 1 << 20 {
        return Err(Error::InvalidArgument("point cloud too large".into()));
    }
    let dist = distance_matrix(c);
    let d = |i: usize, j: usize| dist[i * n + j];

    let mut edges: Vec<(f64, u32, u32)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if d(i, j) <= max_radius {
                edges.push((d(i, j), i as u32, j as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let empty = |dimension| PersistenceDiagram {
        dimension,
        pairs: Vec::new(),
        essential: Vec::new(),
        zero_persistence: 0,
        max_radius,
    };
    let mut h0 = empty(0);
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut death_edge = vec![false; edges.len()];
    for (e, &(diam, a, b)) in edges.iter().enumerate() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            // the root with the larger index joins the other
            let (keep, join) = (ra.min(rb), ra.max(rb));
            parent[join as usize] = keep;
            death_edge[e] = true;
            if diam > 0.0 {
                h0.pairs.push((0.0, diam));
            } else {
                h0.zero_persistence += 1;
            }
        }
    }
    let components = n - death_edge.iter().filter(|x| **x).count();
    h0.essential = vec![0.0; components];
    if max_dimension < 2 {
        return Ok(vec![h0]);
    }

    let mut h1 = empty(1);
    let mut owner: HashMap<u64, usize> = HashMap::new();
    let mut reduced: Vec<Vec<Cofacet>> = Vec::new();
    let mut col: Vec<Cofacet> = Vec::new();
    let mut scratch = Vec::new();
    for (e, &(diam, a, b)) in edges.iter().enumerate().rev() {
        if death_edge[e] {
            continue;
        }
        let (a, b) = (a as usize, b as usize);
        col.clear();
        for k in 0..n {
            if k == a || k == b {
                continue;
            }
            let (dak, dbk) = (d(a, k), d(b, k));
            if dak <= max_radius && dbk <= max_radius {
                col.push(Cofacet {
                    diameter: diam.max(dak).max(dbk),
                    index: triangle_index([a as u64, b as u64, k as u64]),
                });
            }
        }
        // pivot (earliest cofacet) last
        col.sort_unstable_by(|x, y| y.cmp(x));
        while let Some(pivot) = col.last() {
            match owner.get(&pivot.index) {
                Some(&o) => {
                    xor_desc(&col, &reduced[o], &mut scratch);
                    std::mem::swap(&mut col, &mut scratch);
                }
                None => break,
            }
        }
        match col.last() {
            Some(pivot) => {
                if pivot.diameter > diam {
                    h1.pairs.push((diam, pivot.diameter));
                } else {
                    h1.zero_persistence += 1;
                }
                owner.insert(pivot.index, reduced.len());
                reduced.push(col.clone());
            }
            None => h1.essential.push(diam),
        }
    }
    h1.pairs
        .sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    h1.essential.reverse();
    Ok(vec![h0, h1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{persistent_homology, rips_filtration};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut p: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        p
    }

    fn agree(c: &PointCloud, r: f64) {
        let slow = persistent_homology(&rips_filtration(c, 2, r).unwrap()).unwrap();
        let fast = rips_persistence(c, 2, r).unwrap();
        for (s, f) in slow.iter().zip(&fast) {
            assert_eq!(sorted(s.pairs.clone()), sorted(f.pairs.clone()), "H{}", s.dimension);
            assert_eq!(s.zero_persistence, f.zero_persistence);
            let mut se = s.essential.clone();
            let mut fe = f.essential.clone();
            se.sort_by(f64::total_cmp);
            fe.sort_by(f64::total_cmp);
            assert_eq!(se, fe);
        }
    }

    #[test]
    fn triangle_index_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for c in 2..12u64 {
            for b in 1..c {
                for a in 0..b {
                    assert!(seen.insert(triangle_index([c, a, b])));
                }
            }
        }
        assert_eq!(seen.len() as u64, choose3(12));
        assert_eq!(seen.iter().max(), Some(&(choose3(12) - 1)));
    }

    #[test]
    fn matches_boundary_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..60 {
            let n = rng.random_range(3..40);
            let dim = rng.random_range(1..4);
            // coarse integer grids force diameter ties
            let grid = trial % 2 == 0;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..dim)
                        .map(|_| {
                            if grid {
                                rng.random_range(0..4) as f64
                            } else {
                                rng.random::<f64>()
                            }
                        })
                        .collect()
                })
                .collect();
            let c = PointCloud::new(&pts, "t").unwrap();
            let full = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| c.distance(i, j))
                .fold(0.0, f64::max);
            for frac in [0.3, 0.6, 1.0] {
                agree(&c, full * frac + 1e-12);
            }
        }
    }

    #[test]
    fn one_dimensional_only() {
        let pts = vec![vec![0.0], vec![1.0], vec![3.0]];
        let c = PointCloud::new(&pts, "t").unwrap();
        let d = rips_persistence(&c, 1, 10.0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].pairs, vec![(0.0, 1.0), (0.0, 2.0)]);
        assert!(rips_persistence(&c, 3, 1.0).is_err());
    }
}
