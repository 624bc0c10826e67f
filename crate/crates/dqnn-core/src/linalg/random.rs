//! Haar-random unitaries and pure states from a seeded generator.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::linalg::matrix::{ComplexMatrix, C_ZERO};
use crate::linalg::state::PureState;

/// Box-Muller pair of independent standard normals.
fn standard_normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen::<f64>();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = core::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Standard complex Gaussian entry (variance 1/2 per component).
fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let (re, im) = standard_normal_pair(rng);
    Complex64::new(re / 2.0_f64.sqrt(), im / 2.0_f64.sqrt())
}

/// Haar-distributed `d x d` unitary.
///
/// A complex Gaussian matrix is orthonormalized by modified Gram-Schmidt
/// with a second reorthogonalization pass; positive diagonal pivots make the
/// factorization unique, which is what gives the Haar measure.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(d >= 2, "haar_unitary needs d >= 2");
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
        .collect();

    for j in 0..d {
        for _pass in 0..2 {
            for i in 0..j {
                let mut proj = C_ZERO;
                for k in 0..d {
                    proj += cols[i][k].conj() * cols[j][k];
                }
                for k in 0..d {
                    let correction = proj * cols[i][k];
                    cols[j][k] -= correction;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let inv = Complex64::new(1.0 / norm, 0.0);
        for k in 0..d {
            cols[j][k] *= inv;
        }
    }

    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Haar-distributed pure state on `n_qubits`: a normalized vector of
/// independent standard complex Gaussians.
pub fn haar_pure_state(n_qubits: usize, rng: &mut impl Rng) -> PureState {
    assert!(n_qubits >= 1, "haar_pure_state needs n_qubits >= 1");
    let dim = 1usize << n_qubits;
    let mut amps: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let inv = Complex64::new(1.0 / norm, 0.0);
    for a in &mut amps {
        *a *= inv;
    }
    PureState::new(amps).expect("normalized by construction")
}
