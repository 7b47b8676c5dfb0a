//! The three-stage fitting algorithms.
//!
//! Both algorithms standardize the data, screen with the high-dimensional OLS
//! estimator, refit on the screened submodel, hard-threshold, and refit on what
//! survives. LAT refits by ordinary least squares; RAT adds a ridge term
//! `r I` to every refit, with `r` fixed or tuned by K-fold cross-validation on
//! the screened submodel.
//!
//! Everything between standardization and the final back-transform happens in
//! standardized space.

use std::time::{Duration, Instant};

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, hd_ols, restricted_fit, standardize, Cholesky, Coefficients, DesignMatrix,
    ResponseVector, DEFAULT_SCREENING_RIDGE,
};
use crate::selection::{
    analytic_threshold, corollary_threshold, hard_threshold, rank_top_d, select_on_path,
    RankedModelPath, SelectionRule, Stage1Rule, Stage2Rule, RSS_FLOOR_REL,
};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_GRID_LEN: usize = 20;

/// Schema version of [`FitRecord`].
pub const FIT_SCHEMA_VERSION: u32 = 1;

/// 20 log-spaced points in `[1e-4 n, 10 n]`.
pub fn default_r_grid(n: usize) -> Vec<f64> {
    log_grid(1e-4 * n as f64, 10.0 * n as f64, DEFAULT_GRID_LEN)
}

pub fn log_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..len)
        .map(|i| (a + (b - a) * i as f64 / (len - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvScoring {
    PredictionRmse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    /// `None` selects [`default_r_grid`] for the data at hand.
    pub r_grid: Option<Vec<f64>>,
    pub scoring: CvScoring,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            r_grid: None,
            scoring: CvScoring::PredictionRmse,
            seed: 0,
        }
    }
}

impl CvConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn grid_for(&self, n: usize) -> Vec<f64> {
        self.r_grid.clone().unwrap_or_else(|| default_r_grid(n))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.folds < 2 || self.folds > n {
            return Err(Error::InvalidConfig(format!(
                "cross-validation needs 2 <= folds <= n, got folds = {}, n = {n}",
                self.folds
            )));
        }
        if let Some(grid) = &self.r_grid {
            if grid.is_empty() {
                return Err(Error::InvalidConfig("ridge grid is empty".into()));
            }
            if grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
                return Err(Error::InvalidConfig("ridge grid values must be positive".into()));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig("ridge grid must be strictly increasing".into()));
            }
        }
        Ok(())
    }
}

/// Seeded shuffle of `0..n` cut into `folds` contiguous blocks whose sizes
/// differ by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (0..folds)
        .map(|f| {
            let (a, b) = (f * n / folds, (f + 1) * n / folds);
            let mut block = perm[a..b].to_vec();
            block.sort_unstable();
            block
        })
        .collect()
}

/// Indices of `0..n` not in the (sorted) `held_out`.
pub fn complement(n: usize, held_out: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in held_out {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub best_r: f64,
    /// `(r, mean out-of-fold RMSE)` for each grid point, in grid order.
    pub curve: Vec<(f64, f64)>,
}

fn fold_scores(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    test: &[usize],
    grid: &[f64],
) -> Vec<Option<f64>> {
    let train = complement(x.nrows(), test);
    let x_tr = x.select(Axis(0), &train);
    let y_tr = y.select(Axis(0), &train);
    let x_te = x.select(Axis(0), test);
    let y_te = y.select(Axis(0), test);
    let gram = x_tr.t().dot(&x_tr);
    let rhs = x_tr.t().dot(&y_tr);
    grid.iter()
        .map(|&r| {
            let mut a = gram.clone();
            a.diag_mut().iter_mut().for_each(|d| *d += r);
            let chol = Cholesky::factor(a.view()).ok()?;
            let beta = chol.solve(rhs.view());
            let resid = &y_te - &x_te.dot(&beta);
            Some((resid.dot(&resid) / test.len() as f64).sqrt())
        })
        .collect()
}

/// K-fold cross-validation of ridge regression (no intercept) over a grid of
/// ridge parameters. Ties in the score go to the larger `r`.
pub fn cv_ridge(x_sub: &DesignMatrix, y: &ResponseVector, cfg: &CvConfig) -> Result<CvOutcome> {
    check_dims(x_sub, y)?;
    cv_ridge_view(x_sub.view(), y.view(), cfg)
}

pub(crate) fn cv_ridge_view(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    cfg: &CvConfig,
) -> Result<CvOutcome> {
    let n = x.nrows();
    cfg.validate(n)?;
    let grid = cfg.grid_for(n);
    let folds = fold_assignment(n, cfg.folds, cfg.seed);

    let per_fold: Vec<Vec<Option<f64>>> = folds
        .par_iter()
        .map(|test| fold_scores(x, y, test, &grid))
        .collect();
    if let Some(f) = per_fold.iter().position(|s| s.iter().all(Option::is_none)) {
        return Err(Error::InvalidConfig(format!(
            "ridge fit failed for every grid point in fold {f}"
        )));
    }

    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64)> = None;
    for (g, &r) in grid.iter().enumerate() {
        let (sum, count) = per_fold
            .iter()
            .filter_map(|s| s[g])
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            continue;
        }
        let score = sum / count as f64;
        curve.push((r, score));
        if best.is_none_or(|(_, bs)| score <= bs) {
            best = Some((r, score));
        }
    }
    let (best_r, _) = best.expect("at least one grid point scored");
    Ok(CvOutcome { best_r, curve })
}

/// Ridge parameter for RAT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RidgeChoice {
    Fixed { r: f64 },
    CrossValidated(CvConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Lat,
    Rat { ridge: RidgeChoice },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lat => "lat",
            Method::Rat { .. } => "rat",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub stage1: Duration,
    pub stage2: Duration,
    pub stage3: Duration,
    pub total: Duration,
}

/// Output of [`lat`] / [`rat`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub method: Method,
    pub rule: SelectionRule,
    /// Original scale, length `p`, zero outside `support`.
    pub coefficients: Coefficients,
    /// Final model, ascending original column indices.
    pub support: Vec<usize>,
    /// Screened submodel, ascending original column indices.
    pub stage1_submodel: Vec<usize>,
    /// Threshold applied in stage 2 (standardized scale); `None` under BIC.
    pub threshold_used: Option<f64>,
    /// Stage-2 noise variance estimate on the standardized response.
    pub sigma2_hat: f64,
    pub ridge_r: Option<f64>,
    pub cv_curve: Option<Vec<(f64, f64)>>,
    /// Set when screening or thresholding left nothing; the fit is then the
    /// intercept-only model.
    pub null_model: bool,
    pub dropped_constant_cols: Vec<usize>,
    pub timings: StageTimings,
}

impl FitResult {
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        self.coefficients.predict(x)
    }

    pub fn to_record(&self, feature_names: Option<&[String]>) -> FitRecord {
        let name = |j: usize| feature_names.and_then(|f| f.get(j)).cloned();
        FitRecord {
            schema_version: FIT_SCHEMA_VERSION,
            kind: "fit".into(),
            method: self.method.clone(),
            rule: self.rule,
            p: self.coefficients.beta.len(),
            intercept: self.coefficients.intercept,
            support: self.support.clone(),
            support_names: feature_names.map(|_| self.support.iter().filter_map(|&j| name(j)).collect()),
            support_coefficients: self.support.iter().map(|&j| self.coefficients.beta[j]).collect(),
            stage1_submodel: self.stage1_submodel.clone(),
            threshold_used: self.threshold_used,
            sigma2_hat: self.sigma2_hat,
            ridge_r: self.ridge_r,
            cv_curve: self.cv_curve.clone(),
            null_model: self.null_model,
            dropped_constant_cols: self.dropped_constant_cols.clone(),
            timings_ms: TimingsMs::from(&self.timings),
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingsMs {
    pub stage1: f64,
    pub stage2: f64,
    pub stage3: f64,
    pub total: f64,
}

impl From<&StageTimings> for TimingsMs {
    fn from(t: &StageTimings) -> Self {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        Self {
            stage1: ms(t.stage1),
            stage2: ms(t.stage2),
            stage3: ms(t.stage3),
            total: ms(t.total),
        }
    }
}

/// Line-delimited, schema-versioned serialization of a [`FitResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub method: Method,
    pub rule: SelectionRule,
    pub p: usize,
    pub intercept: f64,
    pub support: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub support_names: Option<Vec<String>>,
    pub support_coefficients: Vec<f64>,
    pub stage1_submodel: Vec<usize>,
    pub threshold_used: Option<f64>,
    pub sigma2_hat: f64,
    pub ridge_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cv_curve: Option<Vec<(f64, f64)>>,
    pub null_model: bool,
    pub dropped_constant_cols: Vec<usize>,
    pub timings_ms: TimingsMs,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Least-squares adaptive thresholding.
pub fn lat(x: &DesignMatrix, y: &ResponseVector, rule: &SelectionRule) -> Result<FitResult> {
    fit(x, y, rule, &Method::Lat)
}

/// Ridge adaptive thresholding.
pub fn rat(
    x: &DesignMatrix,
    y: &ResponseVector,
    rule: &SelectionRule,
    ridge: &RidgeChoice,
) -> Result<FitResult> {
    fit(
        x,
        y,
        rule,
        &Method::Rat {
            ridge: ridge.clone(),
        },
    )
}

pub fn fit(
    x: &DesignMatrix,
    y: &ResponseVector,
    rule: &SelectionRule,
    method: &Method,
) -> Result<FitResult> {
    let started = Instant::now();
    let sd = standardize(x, y)?;
    let n = sd.n();
    rule.validate(n)?;
    if let Method::Rat {
        ridge: RidgeChoice::Fixed { r },
    } = method
    {
        if !(*r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidConfig(format!("RAT needs r > 0, got {r}")));
        }
    }
    let xt = sd.x_tilde.view();
    let yt = sd.y_tilde.view();
    let to_original = |local: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = local.iter().map(|&k| sd.retained[k]).collect();
        v.sort_unstable();
        v
    };

    // Stage 1: screening.
    let screening = hd_ols(&sd, DEFAULT_SCREENING_RIDGE).map_err(|e| e.in_stage("stage 1"))?;
    let mut submodel = match rule.stage1 {
        Stage1Rule::FixedSize { d } => rank_top_d(screening.view(), d.min(xt.ncols())),
        Stage1Rule::Ebic { gamma, max_size } => {
            let path = RankedModelPath::from_scores(screening.view());
            select_on_path(xt, yt, &path.order, gamma, max_size.min(xt.ncols()))
                .map_err(|e| e.in_stage("stage 1"))?
                .support
        }
    };
    submodel.sort_unstable();
    let t1 = started.elapsed();

    let mut result = FitResult {
        method: method.clone(),
        rule: *rule,
        coefficients: Coefficients {
            beta: Array1::zeros(x.p()),
            intercept: sd.y_mean,
        },
        support: Vec::new(),
        stage1_submodel: to_original(&submodel),
        threshold_used: None,
        sigma2_hat: yt.dot(&yt) / n as f64,
        ridge_r: None,
        cv_curve: None,
        null_model: true,
        dropped_constant_cols: sd.dropped_constant_cols.clone(),
        timings: StageTimings::default(),
    };
    let finish = |mut r: FitResult, t2: Duration| {
        r.timings = StageTimings {
            stage1: t1,
            stage2: t2.saturating_sub(t1),
            stage3: started.elapsed().saturating_sub(t2),
            total: started.elapsed(),
        };
        r
    };
    if submodel.is_empty() {
        return Ok(finish(result, started.elapsed()));
    }

    // Stage 2: refit on the submodel and trim it.
    let ridge = match method {
        Method::Lat => 0.0,
        Method::Rat {
            ridge: RidgeChoice::Fixed { r },
        } => *r,
        Method::Rat {
            ridge: RidgeChoice::CrossValidated(cfg),
        } => {
            let xs = xt.select(Axis(1), &submodel);
            let cv = cv_ridge_view(xs.view(), yt, cfg).map_err(|e| e.in_stage("stage 2"))?;
            result.cv_curve = Some(cv.curve);
            cv.best_r
        }
    };
    if matches!(method, Method::Rat { .. }) {
        result.ridge_r = Some(ridge);
    }

    let refit = restricted_fit(xt, yt, &submodel, ridge).map_err(|e| e.in_stage("stage 2"))?;
    result.sigma2_hat = refit.sigma2_hat;
    let d = submodel.len();
    // Relative floor on σ̂² for exact fits.
    let sigma2 = refit
        .sigma2_hat
        .max(RSS_FLOOR_REL * yt.dot(&yt) / (n - d) as f64);
    let refit_coefs: Vec<f64> = submodel.iter().map(|&k| refit.coefficients.beta[k]).collect();
    let kept: Vec<usize> = match rule.stage2 {
        Stage2Rule::AnalyticThreshold { delta } => {
            let gamma = analytic_threshold(sigma2, refit.cbar_diag.as_slice().expect("contiguous"), d, delta);
            result.threshold_used = Some(gamma);
            threshold_subset(&submodel, &refit_coefs, gamma)
        }
        Stage2Rule::CorollaryThreshold { delta, kappa } => {
            let gamma = corollary_threshold(sigma2, d, delta, kappa, n);
            result.threshold_used = Some(gamma);
            threshold_subset(&submodel, &refit_coefs, gamma)
        }
        Stage2Rule::Bic { max_size } => {
            let path = RankedModelPath::from_subset(&submodel, &refit_coefs);
            select_on_path(xt, yt, &path.order, 0.0, max_size.min(d))
                .map_err(|e| e.in_stage("stage 2"))?
                .support
        }
    };
    let t2 = started.elapsed();
    if kept.is_empty() {
        return Ok(finish(result, t2));
    }

    // Stage 3: refit on the final model.
    let last = restricted_fit(xt, yt, &kept, ridge).map_err(|e| e.in_stage("stage 3"))?;
    result.coefficients = sd.destandardize(last.coefficients.beta.view());
    result.support = to_original(&kept);
    result.null_model = false;
    Ok(finish(result, t2))
}

fn threshold_subset(submodel: &[usize], coefs: &[f64], gamma: f64) -> Vec<usize> {
    hard_threshold(ArrayView1::from(coefs), gamma)
        .into_iter()
        .map(|i| submodel[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::DEFAULT_DELTA;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, p: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_simple_fn((n, p), || rng.sample(StandardNormal))
    }

    fn rule(d: usize) -> SelectionRule {
        SelectionRule {
            stage1: Stage1Rule::FixedSize { d },
            stage2: Stage2Rule::AnalyticThreshold {
                delta: DEFAULT_DELTA,
            },
        }
    }

    #[test]
    fn folds_partition_indices() {
        let folds = fold_assignment(23, 5, 1);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().all(|&s| s == 4 || s == 5));
        assert_eq!(folds, fold_assignment(23, 5, 1));
    }

    #[test]
    fn default_grid_endpoints() {
        let g = default_r_grid(200);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.02).abs() < 1e-12);
        assert!((g[19] - 2000.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cv_config_validation() {
        let mut cfg = CvConfig::default();
        assert!(cfg.validate(50).is_ok());
        assert!(cfg.validate(5).is_err());
        cfg.r_grid = Some(vec![1.0, 1.0]);
        assert!(cfg.validate(50).is_err());
        cfg.r_grid = Some(vec![]);
        assert!(cfg.validate(50).is_err());
        cfg.r_grid = Some(vec![0.0, 1.0]);
        assert!(cfg.validate(50).is_err());
    }

    #[test]
    fn cv_prefers_least_shrinkage_for_exact_linear_response() {
        let x = gaussian(60, 4, 2);
        let y = x.dot(&array![1.0, -2.0, 0.5, 3.0]);
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let cfg = CvConfig {
            r_grid: Some(vec![1e-3, 1e-1, 1.0, 10.0]),
            ..CvConfig::with_seed(4)
        };
        let out = cv_ridge(&x, &y, &cfg).unwrap();
        assert_eq!(out.best_r, 1e-3);
        assert!(out.curve.windows(2).all(|w| w[0].1 < w[1].1));
    }

    #[test]
    fn cv_ties_go_to_larger_r() {
        // y = 0 gives a zero score at every r.
        let x = DesignMatrix::new(gaussian(20, 3, 8)).unwrap();
        let y = ResponseVector::new(Array1::zeros(20)).unwrap();
        let cfg = CvConfig {
            folds: 4,
            r_grid: Some(vec![0.1, 1.0, 10.0]),
            ..CvConfig::default()
        };
        assert_eq!(cv_ridge(&x, &y, &cfg).unwrap().best_r, 10.0);
    }

    #[test]
    fn noiseless_lat_recovers_truth() {
        let mut x = gaussian(80, 300, 5);
        // Shift and rescale a few columns to exercise de-standardization.
        for j in [0, 4, 10] {
            x.column_mut(j).mapv_inplace(|v| 3.0 * v + 7.0);
        }
        let mut beta = Array1::<f64>::zeros(300);
        for (j, b) in [(0, 2.0), (4, -1.5), (10, 1.0), (50, 2.5), (77, -3.0)] {
            beta[j] = b;
        }
        let y = x.dot(&beta) + 4.0;
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let fit = lat(&x, &y, &rule(24)).unwrap();
        assert_eq!(fit.support, vec![0, 4, 10, 50, 77]);
        for j in 0..300 {
            assert!((fit.coefficients.beta[j] - beta[j]).abs() < 1e-6, "coef {j}");
        }
        assert!((fit.coefficients.intercept - 4.0).abs() < 1e-6);
        assert!(fit.support.iter().all(|j| fit.stage1_submodel.contains(j)));
        assert_eq!(fit.stage1_submodel.len(), 24);
        assert!(!fit.null_model);
    }

    #[test]
    fn constant_columns_are_ignored() {
        let mut x = gaussian(40, 30, 6);
        x.column_mut(3).fill(2.0);
        let y = x.column(0).to_owned() * 2.0 + x.column(5).to_owned();
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let fit = lat(&x, &y, &rule(10)).unwrap();
        assert_eq!(fit.dropped_constant_cols, vec![3]);
        assert_eq!(fit.coefficients.beta[3], 0.0);
        assert_eq!(fit.support, vec![0, 5]);
    }

    #[test]
    fn pure_noise_with_ebic_can_return_null_model() {
        let x = DesignMatrix::new(gaussian(40, 200, 9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let y = ResponseVector::new(Array1::from_shape_simple_fn(40, || {
            rng.sample::<f64, _>(StandardNormal) + 5.0
        }))
        .unwrap();
        let r = SelectionRule {
            stage1: Stage1Rule::Ebic {
                gamma: 1.0,
                max_size: 10,
            },
            stage2: Stage2Rule::AnalyticThreshold { delta: 0.5 },
        };
        let fit = lat(&x, &y, &r).unwrap();
        if fit.null_model {
            assert!(fit.support.is_empty());
            assert!(fit.coefficients.beta.iter().all(|b| *b == 0.0));
            assert!((fit.coefficients.intercept - y.view().mean().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rat_rejects_nonpositive_ridge() {
        let x = DesignMatrix::new(gaussian(30, 50, 1)).unwrap();
        let y = ResponseVector::new(x.view().column(0).to_owned()).unwrap();
        assert!(rat(&x, &y, &rule(5), &RidgeChoice::Fixed { r: 0.0 }).is_err());
    }

    #[test]
    fn record_serializes() {
        let x = DesignMatrix::new(gaussian(30, 50, 1)).unwrap();
        let y = ResponseVector::new(x.view().column(2).to_owned() * 3.0).unwrap();
        let fit = rat(&x, &y, &rule(5), &RidgeChoice::Fixed { r: 0.5 }).unwrap();
        let names: Vec<String> = (0..50).map(|j| format!("f{j}")).collect();
        let rec = fit.to_record(Some(&names));
        let line = serde_json::to_string(&rec).unwrap();
        let back: FitRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.schema_version, FIT_SCHEMA_VERSION);
        assert!(line.contains("\"method\":\"rat\""));
        assert_eq!(back.support_names.unwrap(), vec!["f2".to_string()]);
    }
}
