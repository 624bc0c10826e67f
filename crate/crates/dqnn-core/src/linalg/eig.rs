//! Hermitian eigendecomposition (cyclic Jacobi) and the PSD square root.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

const HERM_INPUT_TOL: f64 = 1e-10;
const PSD_EIG_TOL: f64 = 1e-8;
const PSD_CLAMP_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns, so `H = V diag(vals) V^dagger`. Input must be
/// Hermitian within `1e-10` in max-norm.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            actual: h.cols(),
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = h.hermitian_residual();
    if !(residual <= HERM_INPUT_TOL) {
        return Err(Error::NotHermitian { residual });
    }

    let n = h.rows();
    let mut a = h.clone();
    // Symmetrize so roundoff in the input cannot bias the iteration.
    for i in 0..n {
        for j in 0..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * Complex64::new(0.5, 0.0);
            a[(i, j)] = avg;
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= stop * 1e-2 {
                    continue;
                }
                // Phase that makes the pivot real, then a real rotation.
                let phase = apq / r; // e^{i beta}
                let half = Complex64::from_polar(1.0, 0.5 * phase.arg());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // R has columns p,q: [c*half, s*half; -s*conj(half), c*conj(half)].
                let rpp = half * c;
                let rpq = half * s;
                let rqp = half.conj() * (-s);
                let rqq = half.conj() * c;

                // A <- R^dagger A R, columns first, then rows.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * rpp + akq * rqp;
                    a[(k, q)] = akp * rpq + akq * rqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = rpp.conj() * apk + rqp.conj() * aqk;
                    a[(q, k)] = rpq.conj() * apk + rqq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * rpp + vkq * rqp;
                    v[(k, q)] = vkp * rpq + vkq * rqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// Hermitian PSD square root: eigenvalues in `[-1e-10, 0)` are clamped to 0,
/// anything below `-1e-8` is a domain error.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eig(m)?;
    if let Some(&min) = values.first() {
        if min < -PSD_EIG_TOL {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
        }
    }
    let n = m.rows();
    let mut scaled = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let lam = if values[j] < 0.0 {
            debug_assert!(values[j] >= -PSD_CLAMP_TOL || values[j] >= -PSD_EIG_TOL);
            0.0
        } else {
            values[j]
        };
        let root = Complex64::new(lam.sqrt(), 0.0);
        for i in 0..n {
            scaled[(i, j)] = vectors[(i, j)] * root;
        }
    }
    let mut out = &scaled * &vectors.adjoint();
    // Re-symmetrize: the result is Hermitian up to roundoff by construction.
    for i in 0..n {
        for j in i..n {
            let avg = (out[(i, j)] + out[(j, i)].conj()) * Complex64::new(0.5, 0.0);
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
    }
    Ok(out)
}
