//! Exploratory statistics: Z-normalisation, summaries, rolling bands,
//! correlations, a Kolmogorov–Smirnov normality test and an augmented
//! Dickey–Fuller stationarity decision.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Dataset;
use crate::{Error, Result};

/// Default rolling window, one quarter of weekly data.
pub const DEFAULT_ROLLING_WINDOW: usize = 13;

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population (divide by `n`) standard deviation.
pub(crate) fn population_std(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// `z_t = (x_t - mean) / sigma` with the population sigma.
///
/// A series with zero spread maps to all zeros, so a flat window symbolises
/// to the middle symbol instead of failing. Empty input yields empty output.
pub fn z_normalize(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let m = mean(x);
    let sd = population_std(x);
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - m) / sd).collect()
}

/// Column layout of the per-keyword summary table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Sample (n - 1) standard deviation.
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Quantile by linear interpolation between order statistics of `sorted`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn descriptive_stats(x: &[f64]) -> Result<SummaryStats> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SummaryStats {
        count: x.len(),
        mean: mean(x),
        std: sample_std(x),
        min: sorted[0],
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Rolling mean and volatility band half-width over full windows only.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingStats {
    pub window: usize,
    pub means: Vec<f64>,
    /// Population std of each window.
    pub stds: Vec<f64>,
}

pub fn rolling_stats(x: &[f64], window: usize) -> Result<RollingStats> {
    if window < 2 {
        return Err(Error::InvalidArgument(format!("rolling window {window} < 2")));
    }
    if window > x.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: x.len(),
        });
    }
    let (means, stds) = x
        .windows(window)
        .map(|w| (mean(w), population_std(w)))
        .unzip();
    Ok(RollingStats {
        window,
        means,
        stds,
    })
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    r.is_finite().then(|| r.clamp(-1.0, 1.0))
}

/// Symmetric Pearson matrix; undefined entries (constant series) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub keywords: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn correlation_matrix(d: &Dataset) -> Result<CorrelationMatrix> {
    if d.len() < 2 {
        return Err(Error::InvalidArgument(
            "correlation needs at least two series".into(),
        ));
    }
    let n = d.len();
    let series = d.series();
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        let defined = pearson(series[i].values(), series[i].values()).is_some();
        values[i][i] = defined.then_some(1.0);
        for j in (i + 1)..n {
            let r = pearson(series[i].values(), series[j].values());
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        keywords: d.keywords().into_iter().map(String::from).collect(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityResult {
    pub statistic: f64,
    pub p_value: f64,
    pub reject_5pct: bool,
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // small-lambda series converges fast for the CDF
        let factor = (2.0 * PI).sqrt() / lambda;
        let cdf: f64 = (1..=20)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (-(j * j) * PI * PI / (8.0 * lambda * lambda)).exp()
            })
            .sum::<f64>()
            * factor;
        1.0 - cdf
    } else {
        2.0 * (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}

/// `sup |F_n(t) - Phi((t - mean) / s)|` with the sample mean and the
/// sample (n - 1) standard deviation estimated from `x`.
pub fn ks_statistic(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "{} observation(s)",
            x.len()
        )));
    }
    let m = mean(x);
    let s = sample_std(x);
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateSample("zero standard deviation".into()));
    }
    let normal = Normal::standard();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let f = normal.cdf((v - m) / s);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d)
}

/// Kolmogorov–Smirnov test of normality with estimated parameters and the
/// asymptotic Kolmogorov p-value at `sqrt(n) * D` (no Lilliefors correction).
pub fn ks_normality(x: &[f64]) -> Result<NormalityResult> {
    if x.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "KS test needs at least 8 observations, got {}",
            x.len()
        )));
    }
    let statistic = ks_statistic(x)?;
    let p_value = kolmogorov_survival((x.len() as f64).sqrt() * statistic);
    Ok(NormalityResult {
        statistic,
        p_value,
        reject_5pct: p_value < 0.05,
    })
}

/// Dickey–Fuller critical values for the constant-only regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub one_pct: f64,
    pub five_pct: f64,
    pub ten_pct: f64,
}

// Sample size, then the 1%, 5% and 10% points (Fuller's table, constant, no trend).
const DF_TABLE: [(f64, [f64; 3]); 6] = [
    (25.0, [-3.75, -3.00, -2.63]),
    (50.0, [-3.58, -2.93, -2.60]),
    (100.0, [-3.51, -2.89, -2.58]),
    (250.0, [-3.46, -2.88, -2.57]),
    (500.0, [-3.44, -2.87, -2.57]),
    (f64::INFINITY, [-3.43, -2.86, -2.57]),
];

/// Critical values interpolated linearly in `1 / n` between table rows.
pub fn df_critical_values(n: usize) -> CriticalValues {
    let inv = 1.0 / (n as f64).max(DF_TABLE[0].0);
    let pick = |cv: [f64; 3]| CriticalValues {
        one_pct: cv[0],
        five_pct: cv[1],
        ten_pct: cv[2],
    };
    for w in DF_TABLE.windows(2) {
        let (a, b) = (1.0 / w[0].0, 1.0 / w[1].0);
        if inv <= a && inv >= b {
            let frac = if a == b { 0.0 } else { (a - inv) / (a - b) };
            let mut cv = [0.0; 3];
            for (k, c) in cv.iter_mut().enumerate() {
                *c = w[0].1[k] + frac * (w[1].1[k] - w[0].1[k]);
            }
            return pick(cv);
        }
    }
    pick(DF_TABLE[0].1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityResult {
    /// t-ratio of the lagged-level coefficient.
    pub statistic: f64,
    pub lags_used: usize,
    pub nobs: usize,
    pub critical_values: CriticalValues,
    pub reject_1pct: bool,
    pub reject_5pct: bool,
    pub reject_10pct: bool,
}

/// Schwert's rule `floor(12 * (n / 100)^(1/4))`.
pub fn schwert_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Augmented Dickey–Fuller test with a constant and `p` lagged differences:
/// `dx_t = c + gamma * x_{t-1} + sum_i phi_i * dx_{t-i} + e_t`.
pub fn adf_test(x: &[f64], max_lag: Option<usize>) -> Result<StationarityResult> {
    let n = x.len();
    if n < 20 {
        return Err(Error::InvalidArgument(format!(
            "ADF needs at least 20 observations, got {n}"
        )));
    }
    let p = max_lag.unwrap_or_else(|| schwert_lag(n));
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let k = p + 2;
    let nobs = dx.len().saturating_sub(p);
    if nobs <= k {
        return Err(Error::InvalidArgument(format!(
            "lag {p} leaves {nobs} observations for {k} parameters"
        )));
    }
    // rows j = p..dx.len(): dx[j] on [1, x[j], dx[j-1], ..., dx[j-p]]
    let design = DMatrix::from_fn(nobs, k, |r, c| {
        let j = r + p;
        match c {
            0 => 1.0,
            1 => x[j],
            _ => dx[j - (c - 1)],
        }
    });
    let y = DVector::from_iterator(nobs, dx[p..].iter().copied());

    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > smax * 1e-10) {
        return Err(Error::Numerical(
            "singular ADF regression (collinear regressors)".into(),
        ));
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let resid = &y - &design * &beta;
    let s2 = resid.norm_squared() / (nobs - k) as f64;
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    // Var(beta_1) = s2 * sum_j V[1, j]^2 / sigma_j^2
    let var_gamma: f64 = (0..k)
        .map(|j| {
            let v = v_t[(j, 1)];
            v * v / (sv[j] * sv[j])
        })
        .sum::<f64>()
        * s2;
    let se = var_gamma.sqrt();
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::Numerical(
            "zero standard error for the level coefficient".into(),
        ));
    }
    let statistic = beta[1] / se;
    let critical_values = df_critical_values(n);
    Ok(StationarityResult {
        statistic,
        lags_used: p,
        nobs,
        critical_values,
        reject_1pct: statistic < critical_values.one_pct,
        reject_5pct: statistic < critical_values.five_pct,
        reject_10pct: statistic < critical_values.ten_pct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal as NormalDist, Uniform};

    #[test]
    fn z_normalize_examples() {
        assert_eq!(z_normalize(&[5.0, 5.0, 5.0]), vec![0.0; 3]);
        assert_eq!(z_normalize(&[-1.0, 1.0]), vec![-1.0, 1.0]);
        let z = z_normalize(&[1.0, 2.0, 3.0]);
        // mean 2, population sigma sqrt(2/3)
        let e = 1.0 / (2.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(z[0], -e, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z[2], e, epsilon = 1e-12);
        assert_abs_diff_eq!(e, 1.2247, epsilon = 1e-4);
    }

    #[test]
    fn descriptive_examples() {
        let s = descriptive_stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (2.5, 2.5, 1.0, 4.0));
        let c = descriptive_stats(&[7.0; 10]).unwrap();
        assert_eq!(c.std, 0.0);
        assert_eq!([c.q25, c.median, c.q75], [7.0; 3]);
        // h = 4 * p: 1.0 and 3.0 fall on order statistics 2 and 4
        let f = descriptive_stats(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((f.q25, f.q75), (2.0, 4.0));
        assert_eq!(descriptive_stats(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn rolling_examples() {
        let x: Vec<f64> = (0..262).map(|i| (i as f64).sin()).collect();
        assert_eq!(rolling_stats(&x, 13).unwrap().means.len(), 250);
        assert!(rolling_stats(&[3.0; 20], 13).unwrap().stds.iter().all(|s| *s == 0.0));
        assert_eq!(
            rolling_stats(&[1.0, 2.0, 3.0, 4.0], 2).unwrap().means,
            vec![1.5, 2.5, 3.5]
        );
        assert_eq!(
            rolling_stats(&[1.0, 2.0], 3),
            Err(Error::WindowTooLarge { window: 3, len: 2 })
        );
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_abs_diff_eq!(pearson(&x, &x).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&x, &[-1.0, -2.0, -3.0]).unwrap(), -1.0, epsilon = 1e-15);
        // sxy = 3, sxx = 2, syy = 42/9
        let expected = 3.0 / (2.0f64 * 42.0 / 9.0).sqrt();
        assert_abs_diff_eq!(pearson(&x, &[1.0, 2.0, 4.0]).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.9820, epsilon = 1e-4);
        assert_eq!(pearson(&x, &[2.0; 3]), None);
    }

    #[test]
    fn correlation_matrix_marks_constant_series() {
        use crate::dataset::{default_start, weekly_axis, Dataset, TimeSeries};
        let axis = weekly_axis(default_start(), 4);
        let mk = |k: &str, v: &[f64]| TimeSeries::new(k, axis.clone(), v.to_vec()).unwrap();
        let d = Dataset::new(
            axis.clone(),
            vec![
                mk("a", &[1.0, 2.0, 3.0, 5.0]),
                mk("b", &[2.0, 1.0, 0.0, 1.0]),
                mk("flat", &[4.0; 4]),
            ],
        )
        .unwrap();
        let c = correlation_matrix(&d).unwrap();
        assert_eq!(c.values[0][0], Some(1.0));
        assert_eq!(c.values[0][1], c.values[1][0]);
        assert!(c.values[2].iter().all(Option::is_none));
        assert!(c.values.iter().all(|row| row[2].is_none()));
    }

    #[test]
    fn ks_two_point_statistic() {
        // mean 0.5, s = sqrt(0.5); z = -+0.7071; steps of the ECDF at 0.5 and 1.
        // The largest gap is at either step: Phi(1/sqrt 2) - 1/2 = erf(1/2) / 2.
        let erf_half = 0.520_499_877_813_046_5;
        assert_abs_diff_eq!(ks_statistic(&[0.0, 1.0]).unwrap(), erf_half / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn ks_decisions_on_seeded_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let normal: Vec<f64> = NormalDist::new(0.0, 1.0)
            .unwrap()
            .sample_iter(&mut rng)
            .take(5000)
            .collect();
        let r = ks_normality(&normal).unwrap();
        assert!(!r.reject_5pct, "{r:?}");
        let uniform: Vec<f64> = Uniform::new(0.0, 1.0)
            .unwrap()
            .sample_iter(&mut rng)
            .take(5000)
            .collect();
        let r = ks_normality(&uniform).unwrap();
        assert!(r.reject_5pct, "{r:?}");
        assert!(matches!(ks_normality(&[3.0; 10]), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn kolmogorov_survival_reference_points() {
        // classical asymptotic critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01
        assert_abs_diff_eq!(kolmogorov_survival(1.3581), 0.05, epsilon = 1e-4);
        assert_abs_diff_eq!(kolmogorov_survival(1.6276), 0.01, epsilon = 1e-4);
        assert_abs_diff_eq!(kolmogorov_survival(1.2238), 0.10, epsilon = 1e-4);
        // both branches agree at the switch
        let (lo, hi) = (kolmogorov_survival(1.18 - 1e-9), kolmogorov_survival(1.18));
        assert_abs_diff_eq!(lo, hi, epsilon = 1e-9);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    fn gaussian(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        NormalDist::new(0.0, 1.0)
            .unwrap()
            .sample_iter(&mut rng)
            .take(n)
            .collect()
    }

    fn cumsum(e: &[f64]) -> Vec<f64> {
        e.iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }

    #[test]
    fn adf_random_walk_and_white_noise() {
        let walk = cumsum(&gaussian(1, 262));
        let r = adf_test(&walk, None).unwrap();
        assert_eq!(r.lags_used, 15);
        assert_eq!(r.nobs, 246);
        assert!(!r.reject_5pct, "{r:?}");
        // statsmodels adfuller(walk, maxlag=15, autolag=None, regression="c")
        assert_abs_diff_eq!(r.statistic, -1.4456818670020093, epsilon = 1e-8);

        let noise = gaussian(7, 262);
        let r = adf_test(&noise, None).unwrap();
        assert!(r.reject_1pct, "{r:?}");
        assert!(matches!(adf_test(&[4.0; 50], None), Err(Error::Numerical(_))));
        assert!(adf_test(&[1.0; 19], None).is_err());
    }

    #[test]
    fn adf_lag_zero_matches_closed_form_regression() {
        // with p = 0 the t-ratio is the simple-regression slope t statistic
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = NormalDist::new(0.0, 1.0)
            .unwrap()
            .sample_iter(&mut rng)
            .take(40)
            .collect();
        let dy: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let lag = &x[..x.len() - 1];
        let (mx, my) = (mean(lag), mean(&dy));
        let sxx: f64 = lag.iter().map(|v| (v - mx).powi(2)).sum();
        let sxy: f64 = lag.iter().zip(&dy).map(|(a, b)| (a - mx) * (b - my)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let rss: f64 = lag
            .iter()
            .zip(&dy)
            .map(|(a, b)| (b - icpt - slope * a).powi(2))
            .sum();
        let se = (rss / (dy.len() - 2) as f64 / sxx).sqrt();
        let r = adf_test(&x, Some(0)).unwrap();
        assert_abs_diff_eq!(r.statistic, slope / se, epsilon = 1e-9);
    }

    #[test]
    fn critical_values_interpolate() {
        assert_eq!(df_critical_values(100).five_pct, -2.89);
        assert_eq!(df_critical_values(10).five_pct, -3.00);
        let cv = df_critical_values(262);
        assert!(cv.five_pct < -2.87 && cv.five_pct > -2.89);
        assert!(df_critical_values(1_000_000).five_pct > -2.861);
    }

    proptest! {
        #[test]
        fn z_normalize_moments_and_affine_invariance(
            x in prop::collection::vec(-100.0f64..100.0, 2..60),
            a in 0.1f64..50.0,
            b in -100.0f64..100.0,
        ) {
            prop_assume!(population_std(&x) > 1e-6);
            let z = z_normalize(&x);
            prop_assert!(mean(&z).abs() < 1e-9);
            prop_assert!((population_std(&z) - 1.0).abs() < 1e-9);
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            for (p, q) in z.iter().zip(z_normalize(&y)) {
                prop_assert!((p - q).abs() < 1e-8);
            }
        }

        #[test]
        fn rolling_means_match_slices(
            x in prop::collection::vec(-100.0f64..100.0, 2..80),
            w in 2usize..20,
        ) {
            prop_assume!(w <= x.len());
            let r = rolling_stats(&x, w).unwrap();
            prop_assert_eq!(r.means.len(), x.len() - w + 1);
            for (i, m) in r.means.iter().enumerate() {
                let brute: f64 = x[i..i + w].iter().sum::<f64>() / w as f64;
                prop_assert!((m - brute).abs() < 1e-12);
                prop_assert!(r.stds[i] >= 0.0);
            }
        }

        #[test]
        fn ks_depends_only_on_multiset(
            mut x in prop::collection::vec(-10.0f64..10.0, 8..40),
            seed in any::<u64>(),
        ) {
            prop_assume!(sample_std(&x) > 1e-6);
            let d = ks_statistic(&x).unwrap();
            use rand::seq::SliceRandom;
            x.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert!((ks_statistic(&x).unwrap() - d).abs() < 1e-12);
        }

        #[test]
        fn summary_ordering(x in prop::collection::vec(-1e3f64..1e3, 1..50)) {
            let s = descriptive_stats(&x).unwrap();
            prop_assert!(s.min <= s.q25 && s.q25 <= s.median && s.median <= s.q75 && s.q75 <= s.max);
            prop_assert!(s.std >= 0.0);
        }
    }
}
