use crate::dataset::TimeSeries;
use crate::{Error, Result};

pub const DEFAULT_EMBED_DIM: usize = 6;
pub const DEFAULT_TAU: usize = 3;

/// Points stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    pub source_keyword: String,
}

impl PointCloud {
    pub fn new(points: &[Vec<f64>], source_keyword: impl Into<String>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(
                "points of a cloud must share one dimension".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(Self {
            coords: points.concat(),
            dim,
            source_keyword: source_keyword.into(),
        })
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Point `i` is `(x_i, x_{i+tau}, ..., x_{i+(d-1)tau})`.
pub fn delay_embed_values(
    x: &[f64],
    d: usize,
    tau: usize,
    keyword: impl Into<String>,
) -> Result<PointCloud> {
    if d == 0 || tau == 0 {
        return Err(Error::Embedding(format!(
            "dimension ({d}) and delay ({tau}) must be positive"
        )));
    }
    let span = (d - 1) * tau;
    if x.len() <= span {
        return Err(Error::Embedding(format!(
            "series of length {} too short for d = {d}, tau = {tau}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Embedding("series contains missing values".into()));
    }
    let count = x.len() - span;
    let coords = (0..count)
        .flat_map(|i| (0..d).map(move |k| x[i + k * tau]))
        .collect();
    Ok(PointCloud {
        coords,
        dim: d,
        source_keyword: keyword.into(),
    })
}

pub fn delay_embed(x: &TimeSeries, d: usize, tau: usize) -> Result<PointCloud> {
    delay_embed_values(x.values(), d, tau, x.keyword())
}
