//! Shared oracles for the integration tests, kept independent of the
//! implementation paths they check: a Taylor-series matrix exponential, a
//! power-iteration eigensolver, and a pivoted-elimination determinant.

#![allow(dead_code)]

use dqnn_core::linalg::{ComplexMatrix, C_ONE, C_ZERO};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Matrix exponential by scaling-and-squaring on a plain Taylor series.
pub fn expm_series(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    assert!(a.is_square());
    let norm = a.max_abs() * n as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a.scale(Complex64::new(scale, 0.0));

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigenvalues of a Hermitian PSD matrix by power iteration with deflation,
/// descending. Returns eigenvectors as well.
pub fn psd_eigenpairs_power(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = m.rows();
    let mut work = m.clone();
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut start_rng = rng(0x9e3779b97f4a7c15);
    for _ in 0..n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(start_rng.gen::<f64>() - 0.5, start_rng.gen::<f64>() - 0.5))
            .collect();
        normalize(&mut v);
        for _ in 0..4000 {
            let w = work.mul_vec(&v);
            let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-300 {
                break;
            }
            v = w;
            let inv = Complex64::new(1.0 / norm, 0.0);
            for z in &mut v {
                *z *= inv;
            }
        }
        let image = work.mul_vec(&v);
        let lambda: f64 = v
            .iter()
            .zip(image.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let lambda = lambda.max(0.0);
        values.push(lambda);
        let outer = ComplexMatrix::outer(&v, &v).scale(Complex64::new(lambda, 0.0));
        work = &work - &outer;
        vectors.push(v);
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (values, vectors)
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let inv = Complex64::new(1.0 / norm, 0.0);
    for z in v {
        *z *= inv;
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    assert!(m.is_square());
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).collect())
        .collect();
    let mut det = C_ONE;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_abs < 1e-300 {
            return C_ZERO;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for r in (col + 1)..n {
            let factor = a[r][col] / pivot;
            for c in col..n {
                let sub = factor * a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Random Hermitian matrix with entries of order 1.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(2.0 * rng.gen::<f64>() - 1.0, 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random PSD matrix `G G^dagger`, normalized to unit trace when asked.
pub fn random_psd(d: usize, unit_trace: bool, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let mut m = &g * &g.adjoint();
    if unit_trace {
        let tr = m.trace().re;
        m = m.scale(Complex64::new(1.0 / tr, 0.0));
    }
    // Exact Hermitian symmetrization of roundoff.
    ComplexMatrix::from_fn(d, d, |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * Complex64::new(0.5, 0.0)
    })
}

/// `(|00> + |11>)/sqrt(2)` as amplitudes.
pub fn bell_phi_plus() -> Vec<Complex64> {
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![s, C_ZERO, C_ZERO, s]
}

/// Werner state `p |Phi+><Phi+| + (1 - p) I/4`.
pub fn werner(p: f64) -> ComplexMatrix {
    let bell = bell_phi_plus();
    let proj = ComplexMatrix::outer(&bell, &bell).scale(Complex64::new(p, 0.0));
    let mixed = ComplexMatrix::identity(4).scale(Complex64::new((1.0 - p) / 4.0, 0.0));
    &proj + &mixed
}
