use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Pivots at or below this fraction of the largest diagonal entry are treated
/// as zero. Systems that close to singular carry no usable digits in f64.
pub const PIVOT_RTOL: f64 = 1e-11;

/// Lower-triangular Cholesky factor `L` of a symmetric positive-definite
/// matrix `A = L Lᵀ`, stored densely in row-major order.
#[derive(Debug, Clone)]
pub struct Cholesky {
    factor: Array2<f64>,
    smallest_pivot: f64,
}

impl Cholesky {
    /// Factor `a`. Only the lower triangle of `a` is read.
    pub fn factor(a: ArrayView2<'_, f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "square matrix columns",
                expected: n,
                found: a.ncols(),
            });
        }
        let max_diag = a.diag().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = max_diag * PIVOT_RTOL;

        let mut l = Array2::<f64>::zeros((n, n));
        let mut smallest = f64::INFINITY;
        {
            let ls = l.as_slice_mut().expect("fresh array is contiguous");
            for j in 0..n {
                let (head, tail) = ls.split_at_mut((j + 1) * n);
                let row_j = &mut head[j * n..(j + 1) * n];
                let d = a[[j, j]] - dot(&row_j[..j], &row_j[..j]);
                if !(d > tol) || !d.is_finite() {
                    return Err(Error::SingularSystem {
                        index: j,
                        pivot: d,
                        smallest: smallest.min(d),
                    });
                }
                smallest = smallest.min(d);
                let ljj = d.sqrt();
                row_j[j] = ljj;
                let row_j = &*row_j;
                for (off, row_i) in tail.chunks_exact_mut(n).enumerate() {
                    let i = j + 1 + off;
                    let s = a[[i, j]] - dot(&row_i[..j], &row_j[..j]);
                    row_i[j] = s / ljj;
                }
            }
        }
        Ok(Self {
            factor: l,
            smallest_pivot: smallest,
        })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn lower(&self) -> ArrayView2<'_, f64> {
        self.factor.view()
    }

    /// Smallest pivot `d_j` (the square of `L[j, j]`) met during factorization.
    pub fn smallest_pivot(&self) -> f64 {
        self.smallest_pivot
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: ArrayView1<'_, f64>) -> Array1<f64> {
        let mut x = self.solve_lower(b);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// Solve `L z = b`.
    pub fn solve_lower(&self, b: ArrayView1<'_, f64>) -> Array1<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length");
        let l = self.factor.as_slice().expect("contiguous");
        let mut z = b.to_owned();
        let zs = z.as_slice_mut().expect("contiguous");
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            let s = zs[i] - dot(row, &zs[..i]);
            zs[i] = s / l[i * n + i];
        }
        z
    }

    /// Solve `Lᵀ x = z` in place.
    fn solve_upper_in_place(&self, z: &mut Array1<f64>) {
        let n = self.dim();
        let l = self.factor.as_slice().expect("contiguous");
        let zs = z.as_slice_mut().expect("contiguous");
        for i in (0..n).rev() {
            let xi = zs[i] / l[i * n + i];
            zs[i] = xi;
            // Subtract column i of Lᵀ (= row i of L) from the entries above.
            for k in 0..i {
                zs[k] -= l[i * n + k] * xi;
            }
        }
    }

    /// `L⁻¹ B` for a dense `n × m` right-hand side, by forward substitution
    /// over whole rows.
    pub fn solve_lower_matrix(&self, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let n = self.dim();
        assert_eq!(b.nrows(), n, "right-hand side rows");
        let m = b.ncols();
        let l = self.factor.as_slice().expect("contiguous");
        let mut w = b.as_standard_layout().into_owned();
        let ws = w.as_slice_mut().expect("standard layout");
        for i in 0..n {
            let (done, rest) = ws.split_at_mut(i * m);
            let row_i = &mut rest[..m];
            for k in 0..i {
                let lik = l[i * n + k];
                if lik != 0.0 {
                    let row_k = &done[k * m..(k + 1) * m];
                    for (t, s) in row_i.iter_mut().zip(row_k) {
                        *t -= lik * s;
                    }
                }
            }
            let inv = 1.0 / l[i * n + i];
            row_i.iter_mut().for_each(|t| *t *= inv);
        }
        w
    }

    /// Diagonal of `A⁻¹`, computed as the squared column norms of `L⁻¹`.
    pub fn inverse_diagonal(&self) -> Array1<f64> {
        let n = self.dim();
        let linv = self.solve_lower_matrix(Array2::<f64>::eye(n).view());
        let mut diag = Array1::<f64>::zeros(n);
        for row in linv.rows() {
            for (d, v) in diag.iter_mut().zip(row.iter()) {
                *d += v * v;
            }
        }
        diag
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
