use std::cmp::Ordering;

use super::PointCloud;
use crate::{Error, Result};

/// A vertex, edge or triangle. Unused vertex slots hold `u32::MAX`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    vertices: [u32; 3],
    dim: u8,
    pub diameter: f64,
}

impl Simplex {
    /// `vertices` must be sorted ascending and hold 1 to 3 entries.
    pub fn new(vertices: &[u32], diameter: f64) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > 3 || !vertices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidFiltration(format!(
                "bad vertex list {vertices:?}"
            )));
        }
        let mut v = [u32::MAX; 3];
        v[..vertices.len()].copy_from_slice(vertices);
        Ok(Self {
            vertices: v,
            dim: (vertices.len() - 1) as u8,
            diameter,
        })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices[..=self.dim as usize]
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// Simplices sorted by (diameter, dimension, lexicographic vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    n_vertices: usize,
    pub max_dimension: usize,
    pub max_radius: f64,
}

impl Filtration {
    /// Sorts `simplices` into filtration order. Face closure is checked
    /// later by the reduction.
    pub fn from_simplices(
        mut simplices: Vec<Simplex>,
        max_dimension: usize,
        max_radius: f64,
    ) -> Result<Self> {
        if simplices.iter().any(|s| s.dim() > max_dimension || !s.diameter.is_finite()) {
            return Err(Error::InvalidFiltration(
                "simplex above max dimension or with non-finite diameter".into(),
            ));
        }
        simplices.sort_by(Simplex::filtration_cmp);
        let n_vertices = simplices.iter().filter(|s| s.dim == 0).count();
        Ok(Self {
            simplices,
            n_vertices,
            max_dimension,
            max_radius,
        })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn count_of_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }
}

pub(super) fn distance_matrix(c: &PointCloud) -> Vec<f64> {
    let n = c.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = c.distance(i, j);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// `min_i max_j |p_i - p_j|`: at this scale some point is adjacent to every
/// other, so the complex is connected.
pub fn enclosing_radius(c: &PointCloud) -> f64 {
    let n = c.len();
    (0..n)
        .map(|i| (0..n).map(|j| c.distance(i, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Vietoris–Rips filtration up to `max_dimension` (1 or 2), keeping edges of
/// length at most `max_radius`.
pub fn rips_filtration(c: &PointCloud, max_dimension: usize, max_radius: f64) -> Result<Filtration> {
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
    if n > u32::MAX as usize / 2 {
        return Err(Error::InvalidArgument("point cloud too large".into()));
    }
    let dist = distance_matrix(c);
    let mut simplices: Vec<Simplex> = (0..n as u32)
        .map(|v| Simplex {
            vertices: [v, u32::MAX, u32::MAX],
            dim: 0,
            diameter: 0.0,
        })
        .collect();
    // neighbours with a larger index, ascending
    let mut upper: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j];
            if d <= max_radius {
                upper[i].push(j as u32);
                simplices.push(Simplex {
                    vertices: [i as u32, j as u32, u32::MAX],
                    dim: 1,
                    diameter: d,
                });
            }
        }
    }
    if max_dimension >= 2 {
        for i in 0..n {
            let ni = &upper[i];
            for (a, &j) in ni.iter().enumerate() {
                let nj = &upper[j as usize];
                // common upper neighbours of i and j beyond j
                let (mut p, mut q) = (a + 1, 0);
                while p < ni.len() && q < nj.len() {
                    match ni[p].cmp(&nj[q]) {
                        Ordering::Less => p += 1,
                        Ordering::Greater => q += 1,
                        Ordering::Equal => {
                            let k = ni[p] as usize;
                            let d = dist[i * n + j as usize]
                                .max(dist[i * n + k])
                                .max(dist[j as usize * n + k]);
                            simplices.push(Simplex {
                                vertices: [i as u32, j, k as u32],
                                dim: 2,
                                diameter: d,
                            });
                            p += 1;
                            q += 1;
                        }
                    }
                }
            }
        }
    }
    simplices.sort_unstable_by(Simplex::filtration_cmp);
    Ok(Filtration {
        simplices,
        n_vertices: n,
        max_dimension,
        max_radius,
    })
}
