//! Submodel selection: top-d ranking and eBIC over a ranked nested path for
//! the screening stage, and hard thresholding or BIC for the refinement stage.

use ndarray::{ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, restricted_fit, DesignMatrix, ResponseVector};

/// Default confidence parameter of the analytic threshold.
pub const DEFAULT_DELTA: f64 = 0.5;

/// Default eBIC penalty weight.
pub const DEFAULT_EBIC_GAMMA: f64 = 1.0;

/// Residual sums of squares are floored at this fraction of the null-model
/// RSS before taking logs, so exact fits compare equal instead of being
/// ranked by rounding noise.
pub const RSS_FLOOR_REL: f64 = 1e-20;

/// How the screening stage picks its submodel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stage1Rule {
    FixedSize { d: usize },
    Ebic { gamma: f64, max_size: usize },
}

/// How the refinement stage trims the screened submodel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stage2Rule {
    AnalyticThreshold { delta: f64 },
    CorollaryThreshold { delta: f64, kappa: f64 },
    Bic { max_size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionRule {
    pub stage1: Stage1Rule,
    pub stage2: Stage2Rule,
}

/// Default submodel size `⌊0.3 n⌋` (at least 1).
pub fn default_d(n: usize) -> usize {
    ((0.3 * n as f64).floor() as usize).max(1)
}

/// Default eBIC path length: `min(n - 1, ⌊n / ln n⌋)`.
pub fn default_path_len(n: usize) -> usize {
    let n_f = n as f64;
    let cap = if n > 2 {
        (n_f / n_f.ln()).floor() as usize
    } else {
        1
    };
    cap.min(n.saturating_sub(1))
}

impl SelectionRule {
    /// Top `⌊0.3 n⌋` screening followed by the analytic threshold with
    /// `δ = 0.5`.
    pub fn default_for(n: usize) -> Self {
        Self {
            stage1: Stage1Rule::FixedSize { d: default_d(n) },
            stage2: Stage2Rule::AnalyticThreshold {
                delta: DEFAULT_DELTA,
            },
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        match self.stage1 {
            Stage1Rule::FixedSize { d } => {
                if d == 0 || d >= n {
                    return bad(format!("submodel size d = {d} must satisfy 1 <= d < n = {n}"));
                }
            }
            Stage1Rule::Ebic { gamma, max_size } => {
                if !(0.0..=1.0).contains(&gamma) {
                    return bad(format!("eBIC gamma = {gamma} must lie in [0, 1]"));
                }
                if max_size + 1 > n {
                    return bad(format!("eBIC max_size = {max_size} must be <= n - 1"));
                }
            }
        }
        match self.stage2 {
            Stage2Rule::AnalyticThreshold { delta } => check_delta(delta)?,
            Stage2Rule::CorollaryThreshold { delta, kappa } => {
                check_delta(delta)?;
                if !(kappa > 0.0) || !kappa.is_finite() {
                    return bad(format!("kappa = {kappa} must be positive"));
                }
            }
            Stage2Rule::Bic { max_size } => {
                if max_size + 1 > n {
                    return bad(format!("BIC max_size = {max_size} must be <= n - 1"));
                }
            }
        }
        Ok(())
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "delta = {delta} must lie in (0, 1)"
        )))
    }
}

/// Column indices ordered by decreasing `|score|`, ties by lower index.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedModelPath {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
}

impl RankedModelPath {
    pub fn from_scores(scores: ArrayView1<'_, f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .abs()
                .total_cmp(&scores[a].abs())
                .then(a.cmp(&b))
        });
        Self {
            order,
            scores: scores.to_vec(),
        }
    }

    /// Path over a subset of columns: `scores[k]` belongs to column
    /// `columns[k]`. Used when ranking refit coefficients of a submodel.
    pub fn from_subset(columns: &[usize], scores: &[f64]) -> Self {
        assert_eq!(columns.len(), scores.len());
        let local = Self::from_scores(ArrayView1::from(scores));
        Self {
            order: local.order.iter().map(|&k| columns[k]).collect(),
            scores: scores.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The first `k` entries of the path.
    pub fn prefix(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }
}

/// Indices of the `d` largest `|beta_i|`, in rank order.
pub fn rank_top_d(beta: ArrayView1<'_, f64>, d: usize) -> Vec<usize> {
    let mut path = RankedModelPath::from_scores(beta).order;
    path.truncate(d);
    path
}

/// Result of a criterion search over a nested path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSelection {
    /// Chosen model, ascending.
    pub support: Vec<usize>,
    pub best_k: usize,
    /// Criterion value per model size `k = 0..=max_size`; `None` where the
    /// refit was singular.
    pub criterion: Vec<Option<f64>>,
    pub skipped: Vec<usize>,
}

/// `n log(RSS / n) + k log n + 2 γ k log p`.
pub fn ebic_value(rss: f64, n: usize, k: usize, p: usize, gamma: f64) -> f64 {
    let (n_f, k_f) = (n as f64, k as f64);
    n_f * (rss / n_f).ln() + k_f * n_f.ln() + 2.0 * gamma * k_f * (p as f64).ln()
}

pub(crate) fn select_on_path(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    order: &[usize],
    gamma: f64,
    max_size: usize,
) -> Result<PathSelection> {
    let (n, p) = x.dim();
    if max_size >= n {
        return Err(Error::SupportTooLarge { size: max_size, n });
    }
    let max_size = max_size.min(order.len());
    let floor = RSS_FLOOR_REL * y.dot(&y);

    let fits: Vec<Result<f64>> = (0..=max_size)
        .into_par_iter()
        .map(|k| restricted_fit(x, y, &order[..k], 0.0).map(|f| f.rss))
        .collect();

    let mut criterion = Vec::with_capacity(fits.len());
    let mut skipped = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for (k, fit) in fits.into_iter().enumerate() {
        match fit {
            Ok(rss) => {
                let value = ebic_value(rss.max(floor), n, k, p, gamma);
                criterion.push(Some(value));
                // Strict improvement only: ties stay with the smaller model.
                if best.is_none_or(|(bv, _)| value < bv) {
                    best = Some((value, k));
                }
            }
            Err(Error::SingularSystem { .. }) => {
                criterion.push(None);
                skipped.push(k);
            }
            Err(e) => return Err(e),
        }
    }
    let best_k = best.map(|(_, k)| k).unwrap_or(0);
    let mut support = order[..best_k].to_vec();
    support.sort_unstable();
    Ok(PathSelection {
        support,
        best_k,
        criterion,
        skipped,
    })
}

/// Extended BIC over the nested models formed by the first `k` entries of
/// `path`, `k = 0..=max_size`. Each model is an OLS refit without intercept.
pub fn ebic_select(
    x: &DesignMatrix,
    y: &ResponseVector,
    path: &RankedModelPath,
    gamma: f64,
    max_size: usize,
) -> Result<PathSelection> {
    check_dims(x, y)?;
    select_on_path(x.view(), y.view(), &path.order, gamma, max_size)
}

/// Classical BIC over a nested path (eBIC with `γ = 0`).
pub fn bic_select(
    x: &DesignMatrix,
    y: &ResponseVector,
    path: &RankedModelPath,
    max_size: usize,
) -> Result<PathSelection> {
    ebic_select(x, y, path, 0.0, max_size)
}

/// `mean_i sqrt(2 σ̂² C̄ᵢᵢ log(4d/δ))`.
pub fn analytic_threshold(sigma2_hat: f64, cbar_diag: &[f64], d: usize, delta: f64) -> f64 {
    if cbar_diag.is_empty() {
        return 0.0;
    }
    let log_term = (4.0 * d as f64 / delta).ln();
    let total: f64 = cbar_diag
        .iter()
        .map(|c| (2.0 * sigma2_hat * c * log_term).sqrt())
        .sum();
    total / cbar_diag.len() as f64
}

/// Gaussian-design threshold `8√2 σ̂ sqrt(2 κ log(4d/δ) / n)`.
pub fn corollary_threshold(sigma2_hat: f64, d: usize, delta: f64, kappa: f64, n: usize) -> f64 {
    let log_term = (4.0 * d as f64 / delta).ln();
    8.0 * std::f64::consts::SQRT_2 * sigma2_hat.sqrt() * (2.0 * kappa * log_term / n as f64).sqrt()
}

/// `{i : |beta_i| > gamma_prime}`, ascending.
pub fn hard_threshold(beta: ArrayView1<'_, f64>, gamma_prime: f64) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > gamma_prime)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn gaussian(n: usize, p: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_simple_fn((n, p), || rng.sample(StandardNormal))
    }

    #[test]
    fn top_d_picks_largest_magnitudes() {
        let beta = array![3.0, -5.0, 0.0, 1.0];
        assert_eq!(sorted(rank_top_d(beta.view(), 2)), vec![0, 1]);
        assert_eq!(rank_top_d(beta.view(), 2), vec![1, 0]);
        assert_eq!(sorted(rank_top_d(beta.view(), 4)), vec![0, 1, 2, 3]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let beta = array![1.0, -2.0, 2.0, 1.0];
        assert_eq!(rank_top_d(beta.view(), 3), vec![1, 2, 0]);
    }

    #[test]
    fn hard_threshold_is_strict() {
        let beta = array![0.1, -0.3, 0.25];
        assert_eq!(hard_threshold(beta.view(), 0.25), vec![1]);
        let sparse = array![0.0, 2.0, 0.0, -1e-300];
        assert_eq!(hard_threshold(sparse.view(), 0.0), vec![1, 3]);
        assert!(hard_threshold(beta.view(), f64::INFINITY).is_empty());
    }

    #[test]
    fn analytic_threshold_cases() {
        assert_eq!(analytic_threshold(0.0, &[0.3, 0.2], 2, 0.5), 0.0);
        let c = 0.04;
        let got = analytic_threshold(1.7, &[c; 7], 7, 0.1);
        let want = (2.0 * 1.7 * c * (4.0 * 7.0 / 0.1_f64).ln()).sqrt();
        assert!((got - want).abs() < 1e-15);
        // d = 60, δ = 0.5, σ̂² = 1, C̄ᵢᵢ = 1/200: sqrt(0.01 · ln 480).
        let got = analytic_threshold(1.0, &[1.0 / 200.0; 60], 60, 0.5);
        let want = (0.01 * 480.0_f64.ln()).sqrt();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.2485).abs() < 5e-5);
    }

    #[test]
    fn corollary_threshold_arithmetic() {
        let got = corollary_threshold(4.0, 10, 0.5, 3.0, 200);
        let want = 8.0 * 2f64.sqrt() * 2.0 * (2.0 * 3.0 * 80f64.ln() / 200.0).sqrt();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn ebic_picks_single_noiseless_predictor() {
        let x = gaussian(50, 20, 3);
        let y = x.column(7).to_owned() * 2.5;
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let mut scores = Array1::<f64>::zeros(20);
        for (j, s) in scores.iter_mut().enumerate() {
            *s = 1.0 / (1.0 + j as f64);
        }
        scores[7] = 10.0;
        let path = RankedModelPath::from_scores(scores.view());
        assert_eq!(path.order[0], 7);
        let sel = ebic_select(&x, &y, &path, 1.0, 15).unwrap();
        assert_eq!(sel.support, vec![7]);
        assert_eq!(sel.best_k, 1);
    }

    #[test]
    fn bic_equals_ebic_with_zero_gamma() {
        let x = gaussian(40, 30, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let y: Array1<f64> = x.column(0).to_owned() + x.column(3).to_owned() * 0.5
            + Array1::from_shape_simple_fn(40, || rng.sample::<f64, _>(StandardNormal));
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let scores = x.view().t().dot(y.as_array());
        let path = RankedModelPath::from_scores(scores.view());
        let a = bic_select(&x, &y, &path, 10).unwrap();
        let b = ebic_select(&x, &y, &path, 0.0, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_size_zero_selects_nothing() {
        let x = DesignMatrix::new(gaussian(10, 3, 1)).unwrap();
        let y = ResponseVector::new(x.view().column(0).to_owned()).unwrap();
        let path = RankedModelPath::from_scores(array![1.0, 0.5, 0.2].view());
        let sel = bic_select(&x, &y, &path, 0).unwrap();
        assert!(sel.support.is_empty());
        assert_eq!(sel.criterion.len(), 1);
    }

    #[test]
    fn singular_prefixes_are_skipped() {
        let mut x = gaussian(12, 3, 5);
        let c0 = x.column(0).to_owned();
        x.column_mut(1).assign(&c0);
        let y = &c0 * 2.0 + x.column(2).to_owned() * 0.1;
        let x = DesignMatrix::new(x).unwrap();
        let y = ResponseVector::new(y).unwrap();
        let path = RankedModelPath {
            order: vec![0, 1, 2],
            scores: vec![3.0, 2.0, 1.0],
        };
        let sel = bic_select(&x, &y, &path, 3).unwrap();
        assert_eq!(sel.skipped, vec![2, 3]);
        assert_eq!(sel.best_k, 1);
    }

    #[test]
    fn oversized_path_is_rejected() {
        let x = DesignMatrix::new(gaussian(5, 8, 2)).unwrap();
        let y = ResponseVector::new(Array1::zeros(5)).unwrap();
        let path = RankedModelPath::from_scores(Array1::<f64>::ones(8).view());
        assert!(matches!(
            bic_select(&x, &y, &path, 5),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn rule_validation() {
        assert!(SelectionRule::default_for(200).validate(200).is_ok());
        let bad = SelectionRule {
            stage1: Stage1Rule::FixedSize { d: 200 },
            stage2: Stage2Rule::AnalyticThreshold { delta: 0.5 },
        };
        assert!(bad.validate(200).is_err());
        let bad = SelectionRule {
            stage1: Stage1Rule::FixedSize { d: 10 },
            stage2: Stage2Rule::AnalyticThreshold { delta: 1.0 },
        };
        assert!(bad.validate(200).is_err());
        assert_eq!(default_d(500), 150);
        assert_eq!(default_path_len(200), 37);
        assert_eq!(default_path_len(2), 1);
    }
}
