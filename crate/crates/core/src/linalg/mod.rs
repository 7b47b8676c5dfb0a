//! Dense numeric kernels: standardization, primal and dual ridge solves, the
//! high-dimensional OLS estimator, restricted OLS / ridge refits and the
//! projection-matrix diagnostics.
//!
//! All solves go through a Cholesky factorization. The dual ridge solve only
//! ever forms the `n × n` matrix `X Xᵀ + r Iₙ`, so it stays cheap when `p` is in
//! the tens of thousands.

mod cholesky;

pub use cholesky::{Cholesky, PIVOT_RTOL};

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sample variance below which a column counts as constant.
pub const CONSTANT_VARIANCE: f64 = 1e-14;

/// Ridge term used by the screening estimator.
pub const DEFAULT_SCREENING_RIDGE: f64 = 0.1;

/// Column block width for [`projection_diagnostics`].
pub const DEFAULT_PROJECTION_BLOCK: usize = 256;

/// Dense `n × p` predictor matrix (rows are observations).
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix(Array2<f64>);

impl DesignMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, p) = data.dim();
        if n < 2 || p < 1 {
            return Err(Error::InvalidDimensions(format!(
                "design matrix must have n >= 2 and p >= 1, got {n} x {p}"
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "design matrix",
                index,
            });
        }
        Ok(Self(data))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn p(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Copy of the given columns, in the given order.
    pub fn columns(&self, idx: &[usize]) -> Array2<f64> {
        self.0.select(Axis(1), idx)
    }

    /// Copy of the given rows, in the given order.
    pub fn rows(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.0.select(Axis(0), idx))
    }
}

/// Response vector of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector(Array1<f64>);

impl ResponseVector {
    pub fn new(data: Array1<f64>) -> Result<Self> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "response",
                index,
            });
        }
        Ok(Self(data))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.0
    }

    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.0.select(Axis(0), idx))
    }
}

pub(crate) fn check_dims(x: &DesignMatrix, y: &ResponseVector) -> Result<()> {
    if x.n() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "response length",
            expected: x.n(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Regression coefficients in original column indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub beta: Array1<f64>,
    pub intercept: f64,
}

impl Coefficients {
    pub fn zeros(p: usize) -> Self {
        Self {
            beta: Array1::zeros(p),
            intercept: 0.0,
        }
    }

    /// Indices of the nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        x.dot(&self.beta) + self.intercept
    }
}

/// Centered and scaled copy of a data set plus what is needed to map fitted
/// coefficients back to the original scale.
#[derive(Debug, Clone)]
pub struct StandardizedData {
    /// Retained columns only, each with mean 0 and sample variance 1.
    pub x_tilde: DesignMatrix,
    pub y_tilde: ResponseVector,
    /// Per original column.
    pub col_means: Array1<f64>,
    /// Per original column; sample standard deviation (denominator n - 1).
    pub col_scales: Array1<f64>,
    pub y_mean: f64,
    /// Sample standard deviation of y, or 1 when y is constant.
    pub y_scale: f64,
    pub dropped_constant_cols: Vec<usize>,
    /// Original index of each column of `x_tilde`.
    pub retained: Vec<usize>,
}

impl StandardizedData {
    pub fn n(&self) -> usize {
        self.x_tilde.n()
    }

    /// Column count of the original design.
    pub fn p_original(&self) -> usize {
        self.col_means.len()
    }

    /// Map coefficients fitted on (`x_tilde`, `y_tilde`) back to the original
    /// scale and column indexing. `beta_std` is indexed like `x_tilde`.
    pub fn destandardize(&self, beta_std: ArrayView1<'_, f64>) -> Coefficients {
        assert_eq!(beta_std.len(), self.retained.len());
        let mut beta = Array1::<f64>::zeros(self.p_original());
        let mut shift = 0.0;
        for (k, &j) in self.retained.iter().enumerate() {
            let b = beta_std[k];
            if b != 0.0 {
                let bj = b * self.y_scale / self.col_scales[j];
                beta[j] = bj;
                shift += bj * self.col_means[j];
            }
        }
        Coefficients {
            beta,
            intercept: self.y_mean - shift,
        }
    }

    /// Standardize new observations with the stored column statistics,
    /// keeping only retained columns.
    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros((x.nrows(), self.retained.len()));
        for (mut dst, src) in out.rows_mut().into_iter().zip(x.rows()) {
            for (k, &j) in self.retained.iter().enumerate() {
                dst[k] = (src[j] - self.col_means[j]) / self.col_scales[j];
            }
        }
        out
    }
}

/// Center and scale every non-constant column of `x`, and `y`, to mean 0 and
/// unit sample variance.
pub fn standardize(x: &DesignMatrix, y: &ResponseVector) -> Result<StandardizedData> {
    check_dims(x, y)?;
    let xv = x.view();
    let col_means = xv.mean_axis(Axis(0)).expect("n >= 2");
    let col_vars = xv.var_axis(Axis(0), 1.0);
    let col_scales = col_vars.mapv(f64::sqrt);

    let (retained, dropped): (Vec<usize>, Vec<usize>) =
        (0..x.p()).partition(|&j| col_vars[j] >= CONSTANT_VARIANCE);
    if retained.is_empty() {
        return Err(Error::AllColumnsConstant);
    }

    let mut x_tilde = Array2::<f64>::zeros((x.n(), retained.len()));
    for (mut dst, src) in x_tilde.rows_mut().into_iter().zip(xv.rows()) {
        for (k, &j) in retained.iter().enumerate() {
            dst[k] = (src[j] - col_means[j]) / col_scales[j];
        }
    }

    let yv = y.view();
    let y_mean = yv.mean().expect("n >= 2");
    let y_var = yv.var(1.0);
    let y_scale = if y_var >= CONSTANT_VARIANCE {
        y_var.sqrt()
    } else {
        1.0
    };
    let y_tilde = yv.mapv(|v| (v - y_mean) / y_scale);

    Ok(StandardizedData {
        x_tilde: DesignMatrix(x_tilde),
        y_tilde: ResponseVector(y_tilde),
        col_means,
        col_scales,
        y_mean,
        y_scale,
        dropped_constant_cols: dropped,
        retained,
    })
}

/// `X Xᵀ + r Iₙ`.
fn row_gram(x: ArrayView2<'_, f64>, r: f64) -> Array2<f64> {
    let mut a = x.dot(&x.t());
    a.diag_mut().iter_mut().for_each(|d| *d += r);
    a
}

/// `Xᵀ X + r Iₚ`.
fn column_gram(x: ArrayView2<'_, f64>, r: f64) -> Array2<f64> {
    let mut a = x.t().dot(&x);
    a.diag_mut().iter_mut().for_each(|d| *d += r);
    a
}

fn check_ridge(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "ridge parameter must be finite and >= 0, got {r}"
        )));
    }
    Ok(())
}

pub(crate) fn dual_solve_view(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    r: f64,
) -> Result<Array1<f64>> {
    let chol = Cholesky::factor(row_gram(x, r).view())?;
    let alpha = chol.solve(y);
    Ok(x.t().dot(&alpha))
}

/// Ridge solution through the `n × n` system: `Xᵀ (X Xᵀ + r Iₙ)⁻¹ y`.
///
/// With `r = 0` this is the minimum-norm interpolant and requires `X` to have
/// full row rank.
pub fn ridge_dual_solve(x: &DesignMatrix, y: &ResponseVector, r: f64) -> Result<Coefficients> {
    check_dims(x, y)?;
    check_ridge(r)?;
    Ok(Coefficients {
        beta: dual_solve_view(x.view(), y.view(), r)?,
        intercept: 0.0,
    })
}

/// Ridge solution through the `p × p` normal equations:
/// `(Xᵀ X + r Iₚ)⁻¹ Xᵀ y`.
pub fn ridge_primal_solve(x: &DesignMatrix, y: &ResponseVector, r: f64) -> Result<Coefficients> {
    check_dims(x, y)?;
    check_ridge(r)?;
    let xv = x.view();
    let chol = Cholesky::factor(column_gram(xv, r).view())?;
    let rhs = xv.t().dot(&y.view());
    Ok(Coefficients {
        beta: chol.solve(rhs.view()),
        intercept: 0.0,
    })
}

/// Screening estimator `X̃ᵀ (X̃ X̃ᵀ + ε Iₙ)⁻¹ Ỹ` on standardized data.
///
/// The result lives in standardized space and is indexed like
/// `sd.x_tilde`; see [`StandardizedData::destandardize`].
pub fn hd_ols(sd: &StandardizedData, ridge_eps: f64) -> Result<Array1<f64>> {
    check_ridge(ridge_eps)?;
    dual_solve_view(sd.x_tilde.view(), sd.y_tilde.view(), ridge_eps)
}

/// Outcome of a least-squares or ridge fit restricted to a column subset.
#[derive(Debug, Clone)]
pub struct Refit {
    /// Full length `p`; zero outside the support.
    pub coefficients: Coefficients,
    /// Residual sum of squares over `n - |support|`.
    pub sigma2_hat: f64,
    /// Diagonal of the inverse (possibly ridge-augmented) restricted Gram
    /// matrix, in support order.
    pub cbar_diag: Array1<f64>,
    pub rss: f64,
}

fn check_support(support: &[usize], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    for &j in support {
        if j >= p {
            return Err(Error::InvalidDimensions(format!(
                "support index {j} out of range for p = {p}"
            )));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidDimensions(format!(
                "support index {j} repeated"
            )));
        }
    }
    Ok(())
}

pub(crate) fn restricted_fit(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    support: &[usize],
    r: f64,
) -> Result<Refit> {
    let (n, p) = x.dim();
    check_support(support, p)?;
    let k = support.len();
    if k >= n {
        return Err(Error::SupportTooLarge { size: k, n });
    }
    if k == 0 {
        let rss = y.dot(&y);
        return Ok(Refit {
            coefficients: Coefficients::zeros(p),
            sigma2_hat: rss / n as f64,
            cbar_diag: Array1::zeros(0),
            rss,
        });
    }
    let xs = x.select(Axis(1), support);
    let chol = Cholesky::factor(column_gram(xs.view(), r).view())?;
    let beta_s = chol.solve(xs.t().dot(&y).view());
    let resid = &y - &xs.dot(&beta_s);
    let rss = resid.dot(&resid);
    let mut beta = Array1::<f64>::zeros(p);
    for (&j, &b) in support.iter().zip(beta_s.iter()) {
        beta[j] = b;
    }
    Ok(Refit {
        coefficients: Coefficients {
            beta,
            intercept: 0.0,
        },
        sigma2_hat: rss / (n - k) as f64,
        cbar_diag: chol.inverse_diagonal(),
        rss,
    })
}

/// Exact least squares on the columns in `support` (no intercept).
///
/// An empty support yields the null model with `sigma2_hat = ‖y‖² / n`.
pub fn ols_refit(x: &DesignMatrix, y: &ResponseVector, support: &[usize]) -> Result<Refit> {
    check_dims(x, y)?;
    restricted_fit(x.view(), y.view(), support, 0.0)
}

/// Ridge regression with parameter `r > 0` on the columns in `support`.
pub fn ridge_refit(
    x: &DesignMatrix,
    y: &ResponseVector,
    support: &[usize],
    r: f64,
) -> Result<Refit> {
    check_dims(x, y)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "ridge refit needs r > 0, got {r}"
        )));
    }
    restricted_fit(x.view(), y.view(), support, r)
}

/// Summary of `Φ = Xᵀ (X Xᵀ + ε Iₙ)⁻¹ X`.
#[derive(Debug, Clone)]
pub struct ProjectionDiagnostics {
    pub diag: Array1<f64>,
    pub max_offdiag: f64,
    pub trace: f64,
}

impl ProjectionDiagnostics {
    /// True when every diagonal entry exceeds every off-diagonal magnitude.
    pub fn diagonally_dominant(&self) -> bool {
        self.diag.iter().fold(f64::INFINITY, |m, &v| m.min(v)) > self.max_offdiag
    }
}

/// `W = L⁻¹ X` with `L Lᵀ = X Xᵀ + ε Iₙ`, so that `Φ = Wᵀ W`.
fn whitened(x: ArrayView2<'_, f64>, ridge_eps: f64) -> Result<Array2<f64>> {
    check_ridge(ridge_eps)?;
    let chol = Cholesky::factor(row_gram(x, ridge_eps).view())?;
    Ok(chol.solve_lower_matrix(x))
}

/// Diagonal, largest off-diagonal magnitude and trace of `Φ`, computed in
/// column blocks of width `block` so that at most `block²` entries of `Φ` exist
/// at any time.
pub fn projection_diagnostics(
    x: &DesignMatrix,
    ridge_eps: f64,
    block: usize,
) -> Result<ProjectionDiagnostics> {
    let block = block.max(1);
    let w = whitened(x.view(), ridge_eps)?;
    let p = w.ncols();

    let mut diag = Array1::<f64>::zeros(p);
    for row in w.rows() {
        for (d, v) in diag.iter_mut().zip(row.iter()) {
            *d += v * v;
        }
    }
    let trace = diag.sum();

    let starts: Vec<usize> = (0..p).step_by(block).collect();
    let pairs: Vec<(usize, usize)> = starts
        .iter()
        .enumerate()
        .flat_map(|(a, _)| (a..starts.len()).map(move |b| (a, b)))
        .collect();
    let max_offdiag = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (ra, rb) = (starts[a], starts[b]);
            let wa = w.slice(s![.., ra..(ra + block).min(p)]);
            let wb = w.slice(s![.., rb..(rb + block).min(p)]);
            let g = wa.t().dot(&wb);
            let mut m = 0.0_f64;
            for ((i, j), v) in g.indexed_iter() {
                if a != b || i != j {
                    m = m.max(v.abs());
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);

    Ok(ProjectionDiagnostics {
        diag,
        max_offdiag,
        trace,
    })
}

/// The full `p × p` matrix `Φ`. Only sensible for small `p`.
pub fn projection_matrix(x: &DesignMatrix, ridge_eps: f64) -> Result<Array2<f64>> {
    let w = whitened(x.view(), ridge_eps)?;
    Ok(w.t().dot(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn dm(a: Array2<f64>) -> DesignMatrix {
        DesignMatrix::new(a).unwrap()
    }

    fn rv(a: Array1<f64>) -> ResponseVector {
        ResponseVector::new(a).unwrap()
    }

    #[test]
    fn design_matrix_validates_shape_and_values() {
        assert!(DesignMatrix::new(Array2::zeros((1, 3))).is_err());
        assert!(DesignMatrix::new(Array2::zeros((3, 0))).is_err());
        assert!(matches!(
            DesignMatrix::new(array![[1.0], [f64::NAN]]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn single_constant_column_is_rejected() {
        let x = dm(array![[1.0], [1.0], [1.0]]);
        let y = rv(array![1.0, 2.0, 3.0]);
        assert!(matches!(standardize(&x, &y), Err(Error::AllColumnsConstant)));
    }

    #[test]
    fn standardizes_one_two_three() {
        let x = dm(array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]);
        let y = rv(array![2.0, 4.0, 6.0]);
        let sd = standardize(&x, &y).unwrap();
        assert_eq!(sd.dropped_constant_cols, vec![1]);
        assert_eq!(sd.retained, vec![0]);
        let col = sd.x_tilde.view().column(0).to_owned();
        for (a, b) in col.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in sd.y_tilde.view().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn standardize_rejects_length_mismatch() {
        let x = dm(array![[1.0], [2.0], [3.0]]);
        let y = rv(array![1.0, 2.0]);
        assert!(matches!(
            standardize(&x, &y),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn destandardize_reconstructs_predictions() {
        let x = dm(array![[1.0, 10.0], [2.0, 14.0], [4.0, 11.0], [7.0, 19.0]]);
        let y = rv(array![3.0, 1.0, 4.0, 1.5]);
        let sd = standardize(&x, &y).unwrap();
        let beta_std = array![0.4, -0.7];
        let coef = sd.destandardize(beta_std.view());
        let direct = sd.x_tilde.view().dot(&beta_std) * sd.y_scale + sd.y_mean;
        let via = coef.predict(x.view());
        for (a, b) in direct.iter().zip(via.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_design_returns_response() {
        let x = dm(Array2::eye(4));
        let y = rv(array![1.0, -2.0, 3.5, 0.25]);
        let dual = ridge_dual_solve(&x, &y, 0.0).unwrap();
        let primal = ridge_primal_solve(&x, &y, 0.0).unwrap();
        assert_eq!(dual.beta, *y.as_array());
        assert_eq!(primal.beta, *y.as_array());
    }

    #[test]
    fn duplicated_rows_make_dual_singular() {
        let x = dm(array![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.0, 1.0, 5.0]]);
        let y = rv(array![1.0, 1.0, 2.0]);
        assert!(matches!(
            ridge_dual_solve(&x, &y, 0.0),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn primal_shrinks_monotonically() {
        let x = dm(array![[1.0, 0.3], [0.2, 1.0], [0.5, 0.5], [1.5, -0.2]]);
        let y = rv(array![1.0, 2.0, 0.0, 1.0]);
        let norms: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&r| {
                let b = ridge_primal_solve(&x, &y, r).unwrap().beta;
                b.dot(&b).sqrt()
            })
            .collect();
        assert!(norms[0] > norms[1] && norms[1] > norms[2]);
    }

    #[test]
    fn negative_ridge_is_rejected() {
        let x = dm(Array2::eye(2));
        let y = rv(array![1.0, 1.0]);
        assert!(matches!(
            ridge_dual_solve(&x, &y, -1.0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn zero_response_gives_zero_screening_coefficients() {
        let x = dm(array![[1.0, 2.0, 0.0], [3.0, 1.0, 1.0], [0.0, 0.5, 2.0]]);
        let y = rv(array![0.0, 0.0, 0.0]);
        let sd = standardize(&x, &y).unwrap();
        let b = hd_ols(&sd, 0.1).unwrap();
        assert!(b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ols_refit_orthonormal_noiseless() {
        // Columns 0 and 2 are orthonormal.
        let h = 0.5;
        let x = dm(array![
            [h, 1.0, h],
            [h, 0.0, -h],
            [h, 2.0, -h],
            [h, 0.0, h],
            [0.0, 1.0, 0.0]
        ]);
        let truth = array![2.0, 0.0, -1.5];
        let y = rv(x.view().dot(&truth));
        let fit = ols_refit(&x, &y, &[0, 2]).unwrap();
        for (a, b) in fit.coefficients.beta.iter().zip(truth.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(fit.sigma2_hat < 1e-28);
        assert!((fit.cbar_diag[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn empty_support_is_null_model() {
        let x = dm(array![[1.0], [2.0], [3.0]]);
        let y = rv(array![1.0, -2.0, 2.0]);
        let fit = ols_refit(&x, &y, &[]).unwrap();
        assert!(fit.coefficients.beta.iter().all(|&b| b == 0.0));
        assert!((fit.sigma2_hat - 3.0).abs() < 1e-15);
    }

    #[test]
    fn refit_rejects_oversized_or_bad_support() {
        let x = dm(array![[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 0.0]]);
        let y = rv(array![1.0, 2.0, 3.0]);
        assert!(matches!(
            ols_refit(&x, &y, &[0, 1, 2]),
            Err(Error::SupportTooLarge { size: 3, n: 3 })
        ));
        assert!(ols_refit(&x, &y, &[0, 0]).is_err());
        assert!(ols_refit(&x, &y, &[5]).is_err());
    }

    #[test]
    fn collinear_support_singular_for_ols_finite_for_ridge() {
        let x = dm(array![[1.0, 1.0, 0.3], [2.0, 2.0, 0.1], [3.0, 3.0, 0.7], [4.0, 4.0, 0.2]]);
        let y = rv(array![1.0, 2.0, 2.5, 4.0]);
        assert!(matches!(
            ols_refit(&x, &y, &[0, 1]),
            Err(Error::SingularSystem { .. })
        ));
        let fit = ridge_refit(&x, &y, &[0, 1], 0.1).unwrap();
        assert!(fit.coefficients.beta.iter().all(|b| b.is_finite()));
        assert!(fit.cbar_diag.iter().all(|c| c.is_finite() && *c > 0.0));
        assert!(ridge_refit(&x, &y, &[0], 0.0).is_err());
    }

    #[test]
    fn projection_of_identity_is_identity() {
        let x = dm(Array2::eye(5));
        let d = projection_diagnostics(&x, 0.0, 2).unwrap();
        assert!(d.diag.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!(d.max_offdiag, 0.0);
        assert!((d.trace - 5.0).abs() < 1e-14);
    }

    #[test]
    fn blocked_offdiag_matches_materialized() {
        let x = dm(array![
            [1.0, 0.2, -0.3, 0.5, 1.1, 0.0, 0.4],
            [0.1, 1.0, 0.7, -0.2, 0.3, 0.9, -1.0],
            [0.5, -0.4, 1.2, 0.8, 0.0, 0.3, 0.6]
        ]);
        let phi = projection_matrix(&x, 0.0).unwrap();
        let mut want = 0.0_f64;
        for ((i, j), v) in phi.indexed_iter() {
            if i != j {
                want = want.max(v.abs());
            }
        }
        for block in [1, 2, 3, 7, 100] {
            let d = projection_diagnostics(&x, 0.0, block).unwrap();
            assert!((d.max_offdiag - want).abs() < 1e-14, "block {block}");
            for j in 0..7 {
                assert!((d.diag[j] - phi[[j, j]]).abs() < 1e-14);
            }
        }
    }
}
