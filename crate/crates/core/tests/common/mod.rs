//! Small dense helpers written independently of the library, used as oracles.
#![allow(dead_code)]

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        if piv != col {
            for k in 0..n {
                m.swap([col, k], [piv, k]);
            }
            x.swap(col, piv);
        }
        let d = m[[col, col]];
        assert!(d != 0.0, "singular matrix in oracle solve");
        for i in col + 1..n {
            let f = m[[i, col]] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[[i, k]] -= f * m[[col, k]];
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= m[[i, k]] * x[k];
        }
        x[i] = s / m[[i, i]];
    }
    x
}

/// `(XᵀX + r I)⁻¹ Xᵀ y` with explicit loops.
pub fn ridge_oracle(x: ArrayView2<f64>, y: ArrayView1<f64>, r: f64) -> Array1<f64> {
    let (n, p) = x.dim();
    let mut g = Array2::<f64>::zeros((p, p));
    let mut rhs = Array1::<f64>::zeros(p);
    for i in 0..n {
        for a in 0..p {
            rhs[a] += x[[i, a]] * y[i];
            for b in 0..p {
                g[[a, b]] += x[[i, a]] * x[[i, b]];
            }
        }
    }
    for a in 0..p {
        g[[a, a]] += r;
    }
    gauss_solve(&g, &rhs)
}

/// OLS with intercept on the given columns, returned as (intercept, coefficients).
pub fn ols_with_intercept(x: ArrayView2<f64>, y: ArrayView1<f64>, cols: &[usize]) -> (f64, Vec<f64>) {
    let n = x.nrows();
    let k = cols.len() + 1;
    let design = Array2::from_shape_fn((n, k), |(i, j)| if j == 0 { 1.0 } else { x[[i, cols[j - 1]]] });
    let beta = ridge_oracle(design.view(), y, 0.0);
    (beta[0], beta.iter().skip(1).copied().collect())
}

pub fn rel_l2(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let d = a - b;
    d.dot(&d).sqrt() / b.dot(b).sqrt().max(f64::MIN_POSITIVE)
}
