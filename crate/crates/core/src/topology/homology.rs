use std::collections::HashMap;

use super::Filtration;
use crate::{Error, Result};

/// Finite `(birth, death)` pairs of one homology degree plus the births of
/// classes still alive at the end of the filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    pub pairs: Vec<(f64, f64)>,
    /// Births of essential (never-dying) classes.
    pub essential: Vec<f64>,
    /// Pairs with `birth == death`, dropped from `pairs`.
    pub zero_persistence: usize,
    /// Scale at which the filtration was truncated.
    pub max_radius: f64,
}

impl PersistenceDiagram {
    pub fn essential_count(&self) -> usize {
        self.essential.len()
    }

    pub fn max_persistence(&self) -> f64 {
        self.pairs.iter().map(|(b, d)| d - b).fold(0.0, f64::max)
    }

    pub fn max_death(&self) -> f64 {
        self.pairs.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// Drops pairs whose persistence is below `floor` times the largest
    /// persistence in this diagram.
    pub fn filtered(&self, floor: f64) -> Self {
        let cut = floor * self.max_persistence();
        Self {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|(b, d)| d - b >= cut)
                .collect(),
            ..self.clone()
        }
    }
}

/// Symmetric difference of two ascending index lists.
fn xor_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

struct FaceIndex {
    vertices: HashMap<u32, u32>,
    edges: HashMap<(u32, u32), u32>,
}

impl FaceIndex {
    fn build(f: &Filtration) -> Self {
        let mut vertices = HashMap::new();
        let mut edges = HashMap::new();
        for (idx, s) in f.simplices().iter().enumerate() {
            let v = s.vertices();
            match s.dim() {
                0 => {
                    vertices.insert(v[0], idx as u32);
                }
                1 => {
                    edges.insert((v[0], v[1]), idx as u32);
                }
                _ => {}
            }
        }
        Self { vertices, edges }
    }

    /// Boundary of simplex `j` as ascending filtration indices, checking
    /// that every face exists and precedes `j`.
    fn boundary(&self, f: &Filtration, j: usize) -> Result<Vec<u32>> {
        let s = &f.simplices()[j];
        let v = s.vertices();
        let faces: Vec<Option<u32>> = match s.dim() {
            0 => return Ok(Vec::new()),
            1 => vec![self.vertices.get(&v[0]).copied(), self.vertices.get(&v[1]).copied()],
            _ => vec![
                self.edges.get(&(v[0], v[1])).copied(),
                self.edges.get(&(v[0], v[2])).copied(),
                self.edges.get(&(v[1], v[2])).copied(),
            ],
        };
        let mut col = Vec::with_capacity(faces.len());
        for face in faces {
            match face {
                Some(i) if (i as usize) < j => col.push(i),
                _ => {
                    return Err(Error::InvalidFiltration(format!(
                        "a face of simplex {v:?} is missing or appears after it"
                    )))
                }
            }
        }
        col.sort_unstable();
        Ok(col)
    }
}

const NONE: u32 = u32::MAX;

/// Standard column reduction over GF(2) with clearing, highest dimension
/// first. Returns one diagram per degree `0..max_dimension`.
pub fn persistent_homology(f: &Filtration) -> Result<Vec<PersistenceDiagram>> {
    let simplices = f.simplices();
    let m = simplices.len();
    if m >= NONE as usize {
        return Err(Error::InvalidArgument("filtration too large".into()));
    }
    if simplices.windows(2).any(|w| w[1].diameter < w[0].diameter) {
        return Err(Error::InvalidFiltration("diameters decrease".into()));
    }
    let faces = FaceIndex::build(f);
    let max_dim = simplices.iter().map(|s| s.dim()).max().unwrap_or(0);

    let mut pivot_of_row = vec![NONE; m];
    let mut cleared = vec![false; m];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut scratch = Vec::new();

    for dim in (1..=max_dim).rev() {
        for j in 0..m {
            if simplices[j].dim() != dim {
                continue;
            }
            // validate faces even for cleared columns
            let mut col = faces.boundary(f, j)?;
            if cleared[j] {
                continue;
            }
            while let Some(&low) = col.last() {
                let p = pivot_of_row[low as usize];
                if p == NONE {
                    break;
                }
                xor_into(&col, &reduced[p as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_of_row[low as usize] = j as u32;
                cleared[low as usize] = true;
                reduced[j] = col;
            }
        }
    }

    let degrees = f.max_dimension.max(1);
    let mut diagrams: Vec<PersistenceDiagram> = (0..degrees)
        .map(|dimension| PersistenceDiagram {
            dimension,
            pairs: Vec::new(),
            essential: Vec::new(),
            zero_persistence: 0,
            max_radius: f.max_radius,
        })
        .collect();
    for (j, col) in reduced.iter().enumerate() {
        let Some(&low) = col.last() else { continue };
        let birth_simplex = &simplices[low as usize];
        let Some(diagram) = diagrams.get_mut(birth_simplex.dim()) else {
            continue;
        };
        let (b, d) = (birth_simplex.diameter, simplices[j].diameter);
        if d > b {
            diagram.pairs.push((b, d));
        } else {
            diagram.zero_persistence += 1;
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let positive = reduced[i].is_empty();
        if positive && pivot_of_row[i] == NONE {
            if let Some(diagram) = diagrams.get_mut(s.dim()) {
                diagram.essential.push(s.diameter);
            }
        }
    }
    Ok(diagrams)
}

/// One bar of a barcode; `open` bars are essential classes truncated at the
/// filtration's `max_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
    pub open: bool,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Bars sorted by descending persistence, open bars first.
pub fn barcode(pd: &PersistenceDiagram) -> Vec<Bar> {
    let mut bars: Vec<Bar> = pd
        .essential
        .iter()
        .map(|&birth| Bar {
            birth,
            death: pd.max_radius,
            open: true,
        })
        .chain(pd.pairs.iter().map(|&(birth, death)| Bar {
            birth,
            death,
            open: false,
        }))
        .collect();
    bars.sort_by(|a, b| {
        b.open
            .cmp(&a.open)
            .then(b.persistence().total_cmp(&a.persistence()))
            .then(a.birth.total_cmp(&b.birth))
    });
    bars
}
