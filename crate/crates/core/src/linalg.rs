//! Householder QR least squares for the (small, dense) regression design.

use alloc::vec;
use alloc::vec::Vec;

/// A column whose remaining norm after orthogonalization falls below this
/// fraction of its original norm is treated as linearly dependent.
pub(crate) const RANK_TOLERANCE: f64 = 1e-10;

/// Result of an ordinary least-squares solve.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residual_sum_squares: f64,
    /// `(XᵀX)⁻¹` as a row-major `p × p` matrix.
    pub gram_inverse: Vec<f64>,
}

/// Outcome of a failed factorization: the index of the first dependent column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DependentColumn(pub usize);

/// Solves `min ‖y − Xβ‖` for a full-column-rank `X` given as a list of columns.
pub(crate) fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares, DependentColumn> {
    let p = columns.len();
    let n = y.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));
    debug_assert!(n > p);

    // Column-major working copy; overwritten with R above the diagonal and
    // the Householder vectors below it.
    let mut a: Vec<f64> = columns.iter().flat_map(|c| c.iter().copied()).collect();
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; p];

    for k in 0..p {
        let original_norm = norm(&columns[k]);
        let col = &mut a[k * n..(k + 1) * n];
        let alpha = norm(&col[k..]);
        if original_norm == 0.0 || alpha <= RANK_TOLERANCE * original_norm {
            return Err(DependentColumn(k));
        }
        let r_kk = if col[k] > 0.0 { -alpha } else { alpha };
        // v = x − r_kk e_k, stored in place. The sign choice keeps vᵀv ≥ 2 alpha².
        col[k] -= r_kk;
        let vtv = dot(&col[k..], &col[k..]);
        diag[k] = r_kk;

        let v: Vec<f64> = col[k..].to_vec();
        for j in (k + 1)..p {
            let cj = &mut a[j * n + k..(j + 1) * n];
            let s = 2.0 * dot(&v, cj) / vtv;
            for (c, vi) in cj.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        let s = 2.0 * dot(&v, &qty[k..]) / vtv;
        for (q, vi) in qty[k..].iter_mut().zip(&v) {
            *q -= s * vi;
        }
    }

    // R (upper triangular, p × p), row-major.
    let mut r = vec![0.0; p * p];
    for j in 0..p {
        for i in 0..j {
            r[i * p + j] = a[j * n + i];
        }
        r[j * p + j] = diag[j];
    }

    let coefficients = back_substitute(&r, p, &qty[..p]);
    let residual_sum_squares = qty[p..].iter().map(|v| v * v).sum();

    let r_inv = upper_triangular_inverse(&r, p);
    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ
    let mut gram_inverse = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            let mut s = 0.0;
            for k in j..p {
                s += r_inv[i * p + k] * r_inv[j * p + k];
            }
            gram_inverse[i * p + j] = s;
            gram_inverse[j * p + i] = s;
        }
    }

    Ok(LeastSquares { coefficients, residual_sum_squares, gram_inverse })
}

fn back_substitute(r: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in (i + 1)..p {
            s -= r[i * p + j] * x[j];
        }
        x[i] = s / r[i * p + i];
    }
    x
}

fn upper_triangular_inverse(r: &[f64], p: usize) -> Vec<f64> {
    let mut inv = vec![0.0; p * p];
    for col in 0..p {
        // Solve R x = e_col.
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in (i + 1)..=col {
                s -= r[i * p + j] * inv[j * p + col];
            }
            inv[i * p + col] = s / r[i * p + i];
        }
    }
    inv
}

/// Cholesky check for a symmetric row-major matrix; `true` when positive definite.
pub(crate) fn is_positive_definite(m: &[f64], p: usize) -> bool {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = m[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i * p + i] = libm::sqrt(s);
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    true
}

/// `xᵀ M x` for a row-major `p × p` matrix.
pub(crate) fn quadratic_form(m: &[f64], x: &[f64]) -> f64 {
    let p = x.len();
    let mut acc = 0.0;
    for i in 0..p {
        acc += x[i] * dot(&m[i * p..(i + 1) * p], x);
    }
    acc
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow on large-magnitude columns.
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * libm::sqrt(ss)
}
