use rayon::prelude::*;

use super::embedding::{DEFAULT_EMBED_DIM, DEFAULT_TAU};
use super::landscape::{DEFAULT_GRID_SIZE, DEFAULT_K_MAX};
use super::{
    delay_embed, enclosing_radius, landscape, rips_persistence,
    PersistenceDiagram, PointCloud,
};
use crate::dataset::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TdaStrategy {
    /// Landscapes of the degree-1 diagram only.
    H1Only,
    /// Degree-0 and degree-1 landscapes of persistence-filtered diagrams,
    /// concatenated.
    H0H1Filtered,
}

impl TdaStrategy {
    pub fn name(self) -> &'static str {
        match self {
            TdaStrategy::H1Only => "H1_ONLY",
            TdaStrategy::H0H1Filtered => "H0_H1_FILTERED",
        }
    }
}

impl std::str::FromStr for TdaStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "H1_ONLY" | "H1" => Ok(TdaStrategy::H1Only),
            "H0_H1_FILTERED" | "H0_H1" => Ok(TdaStrategy::H0H1Filtered),
            _ => Err(Error::InvalidArgument(format!("unknown TDA strategy {s:?}"))),
        }
    }
}

/// How the Rips scale cap is chosen per point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    /// `min_i max_j d(i, j)`; bounds the simplex count while leaving one
    /// connected component.
    Enclosing,
    /// The cloud diameter: the full filtration.
    Full,
    Fixed(f64),
}

impl RadiusRule {
    pub fn radius(&self, c: &PointCloud) -> f64 {
        let r = match *self {
            RadiusRule::Enclosing => enclosing_radius(c),
            RadiusRule::Full => {
                let n = c.len();
                (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .map(|(i, j)| c.distance(i, j))
                    .fold(0.0, f64::max)
            }
            RadiusRule::Fixed(r) => r,
        };
        // a collapsed cloud (constant series) still needs a positive cap
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdaParams {
    pub embed_dim: usize,
    pub tau: usize,
    pub max_dimension: usize,
    pub radius: RadiusRule,
    pub k_max: usize,
    pub grid_size: usize,
    pub persistence_floor: f64,
}

impl Default for TdaParams {
    fn default() -> Self {
        Self {
            embed_dim: DEFAULT_EMBED_DIM,
            tau: DEFAULT_TAU,
            max_dimension: 2,
            radius: RadiusRule::Enclosing,
            k_max: DEFAULT_K_MAX,
            grid_size: DEFAULT_GRID_SIZE,
            persistence_floor: 0.10,
        }
    }
}

/// Diagrams of one series, degree 0 first.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDiagrams {
    pub keyword: String,
    pub n_points: usize,
    pub max_radius: f64,
    pub diagrams: Vec<PersistenceDiagram>,
}

impl SeriesDiagrams {
    fn degree(&self, dim: usize) -> Result<&PersistenceDiagram> {
        self.diagrams.get(dim).ok_or_else(|| {
            Error::InvalidArgument(format!("no degree-{dim} diagram for `{}`", self.keyword))
        })
    }
}

/// Embeds, filters and reduces every series; series run in parallel.
pub fn compute_diagrams(d: &Dataset, params: &TdaParams) -> Result<Vec<SeriesDiagrams>> {
    d.series()
        .par_iter()
        .map(|s| {
            let cloud = delay_embed(s, params.embed_dim, params.tau)?;
            let max_radius = params.radius.radius(&cloud);
            Ok(SeriesDiagrams {
                keyword: s.keyword().to_string(),
                n_points: cloud.len(),
                max_radius,
                diagrams: rips_persistence(&cloud, params.max_dimension, max_radius)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdaFeatureMatrix {
    pub keywords: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub strategy: TdaStrategy,
    /// Upper end of the shared landscape grid.
    pub t_max: f64,
    pub k_max: usize,
    pub grid_size: usize,
}

impl TdaFeatureMatrix {
    /// Degree-0/degree-1 diagrams actually fed to the landscapes of row `i`.
    pub fn used_diagrams(
        strategy: TdaStrategy,
        sd: &SeriesDiagrams,
        floor: f64,
    ) -> Result<Vec<PersistenceDiagram>> {
        Ok(match strategy {
            TdaStrategy::H1Only => vec![sd.degree(1)?.clone()],
            TdaStrategy::H0H1Filtered => {
                vec![sd.degree(0)?.filtered(floor), sd.degree(1)?.filtered(floor)]
            }
        })
    }
}

pub fn feature_matrix_from_diagrams(
    diagrams: &[SeriesDiagrams],
    strategy: TdaStrategy,
    params: &TdaParams,
) -> Result<TdaFeatureMatrix> {
    if !(0.0..=1.0).contains(&params.persistence_floor) {
        return Err(Error::InvalidArgument(format!(
            "persistence floor {} outside [0, 1]",
            params.persistence_floor
        )));
    }
    let used = diagrams
        .iter()
        .map(|sd| TdaFeatureMatrix::used_diagrams(strategy, sd, params.persistence_floor))
        .collect::<Result<Vec<_>>>()?;
    let t_max = used
        .iter()
        .flatten()
        .map(PersistenceDiagram::max_death)
        .fold(0.0, f64::max);
    let t_max = if t_max > 0.0 { t_max } else { 1.0 };
    let rows = used
        .iter()
        .map(|pds| {
            pds.iter()
                .map(|pd| Ok(landscape(pd, params.k_max, params.grid_size, t_max)?.flatten()))
                .collect::<Result<Vec<_>>>()
                .map(|blocks| blocks.concat())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TdaFeatureMatrix {
        keywords: diagrams.iter().map(|sd| sd.keyword.clone()).collect(),
        rows,
        strategy,
        t_max,
        k_max: params.k_max,
        grid_size: params.grid_size,
    })
}

pub fn feature_matrix(
    d: &Dataset,
    strategy: TdaStrategy,
    params: &TdaParams,
) -> Result<TdaFeatureMatrix> {
    feature_matrix_from_diagrams(&compute_diagrams(d, params)?, strategy, params)
}
