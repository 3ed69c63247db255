use super::PersistenceDiagram;
use crate::{Error, Result};

pub const DEFAULT_K_MAX: usize = 5;
pub const DEFAULT_GRID_SIZE: usize = 100;

/// `values[k][g]` is `lambda_{k+1}` at `grid[g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceLandscape {
    pub grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PersistenceLandscape {
    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    /// Levels concatenated in order, `k_max * grid_size` entries.
    pub fn flatten(&self) -> Vec<f64> {
        self.values.concat()
    }
}

/// Tent function of the interval `[birth, death]` at `t`.
fn tent(birth: f64, death: f64, t: f64) -> f64 {
    (t - birth).min(death - t).max(0.0)
}

/// Samples `lambda_1..lambda_{k_max}` of the finite pairs of `pd` on a
/// uniform grid of `grid_size` points spanning `[0, t_max]`. Essential
/// classes are ignored.
pub fn landscape(
    pd: &PersistenceDiagram,
    k_max: usize,
    grid_size: usize,
    t_max: f64,
) -> Result<PersistenceLandscape> {
    if k_max == 0 || grid_size < 2 || !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "landscape needs k_max >= 1, grid_size >= 2, t_max > 0 (got {k_max}, {grid_size}, {t_max})"
        )));
    }
    let step = t_max / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|g| g as f64 * step).collect();
    let mut values = vec![vec![0.0; grid_size]; k_max];
    let mut heights = Vec::with_capacity(pd.pairs.len());
    for (g, &t) in grid.iter().enumerate() {
        heights.clear();
        heights.extend(
            pd.pairs
                .iter()
                .map(|&(b, d)| tent(b, d, t))
                .filter(|h| *h > 0.0),
        );
        heights.sort_unstable_by(|a, b| b.total_cmp(a));
        for (k, h) in heights.iter().take(k_max).enumerate() {
            values[k][g] = *h;
        }
    }
    Ok(PersistenceLandscape { grid, values })
}
