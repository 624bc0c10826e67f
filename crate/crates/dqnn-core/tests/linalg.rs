mod common;

use common::{determinant, psd_eigenpairs_power, random_hermitian, random_psd, rng};
use dqnn_core::linalg::{
    embed_on_qubits, haar_pure_state, haar_unitary, hermitian_eig, kron, partial_trace, pauli_x,
    psd_sqrt, ComplexMatrix, DensityMatrix, PureState, C_ONE, C_ZERO,
};
use dqnn_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_complex_matrix(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    })
}

#[test]
fn kron_identity_blocks() {
    let i2 = ComplexMatrix::identity(2);
    assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
}

#[test]
fn kron_projector_block_structure() {
    let mut rng = rng(11);
    let m = random_complex_matrix(2, &mut rng);
    let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let out = kron(&p0, &m);
    // Top-left block is m, everything else zero.
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i < 2 && j < 2 { m[(i, j)] } else { C_ZERO };
            assert_eq!(out[(i, j)], expected);
        }
    }
}

#[test]
fn kron_mixed_product_identity() {
    // kron(A,B) * kron(C,D) = kron(AC, BD), checked by direct multiplication.
    let mut rng = rng(12);
    for _ in 0..10 {
        let a = random_complex_matrix(2, &mut rng);
        let b = random_complex_matrix(2, &mut rng);
        let c = random_complex_matrix(2, &mut rng);
        let d = random_complex_matrix(2, &mut rng);
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }
}

#[test]
fn kron_associativity() {
    let mut rng = rng(13);
    let a = random_complex_matrix(2, &mut rng);
    let b = random_complex_matrix(2, &mut rng);
    let c = random_complex_matrix(2, &mut rng);
    let lhs = kron(&kron(&a, &b), &c);
    let rhs = kron(&a, &kron(&b, &c));
    assert!(lhs.max_abs_diff(&rhs) < 1e-15);
}

#[test]
fn partial_trace_product_state() {
    let mut r = rng(21);
    let rho = DensityMatrix::new(random_psd(4, true, &mut r)).unwrap();
    let sigma = DensityMatrix::new(random_psd(2, true, &mut r)).unwrap();
    let joint = DensityMatrix::new(kron(rho.matrix(), sigma.matrix())).unwrap();
    // Tracing the appended qubit (qubit 3) recovers rho.
    let reduced = partial_trace(&joint, &[3]).unwrap();
    assert!(reduced.matrix().max_abs_diff(rho.matrix()) < 1e-13);
}

#[test]
fn partial_trace_bell_gives_maximally_mixed() {
    let bell = PureState::new(common::bell_phi_plus()).unwrap();
    let reduced = partial_trace(&bell.to_density(), &[1]).unwrap();
    let expected = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
    assert!(reduced.matrix().max_abs_diff(&expected) < 1e-15);
}

#[test]
fn partial_trace_preserves_trace_and_positivity() {
    let mut r = rng(22);
    for _ in 0..5 {
        let rho = DensityMatrix::new(random_psd(16, true, &mut r)).unwrap();
        let reduced = partial_trace(&rho, &[1, 2]).unwrap();
        let tr = reduced.matrix().trace();
        assert!((tr.re - 1.0).abs() < 1e-13 && tr.im.abs() < 1e-13);
        assert!(reduced.matrix().hermitian_residual() < 1e-13);
        // PSD via the independent power-iteration oracle.
        let (vals, _) = psd_eigenpairs_power(reduced.matrix());
        assert!(vals.iter().all(|&v| v >= -1e-10));
    }
}

#[test]
fn partial_trace_rejects_bad_indices() {
    let rho = DensityMatrix::maximally_mixed(2);
    assert!(matches!(
        partial_trace(&rho, &[3]),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(partial_trace(&rho, &[1, 1]).is_err());
    assert!(partial_trace(&rho, &[1, 2]).is_err());
}

#[test]
fn hermitian_eig_diagonal() {
    let h = ComplexMatrix::from_real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
    let (vals, _) = hermitian_eig(&h).unwrap();
    assert!((vals[0] - 1.0).abs() < 1e-14);
    assert!((vals[1] - 2.0).abs() < 1e-14);
    assert!((vals[2] - 3.0).abs() < 1e-14);
}

#[test]
fn hermitian_eig_pauli_spectrum() {
    let (vals, _) = hermitian_eig(&pauli_x()).unwrap();
    assert!((vals[0] + 1.0).abs() < 1e-14);
    assert!((vals[1] - 1.0).abs() < 1e-14);
}

#[test]
fn hermitian_eig_reconstructs_random_input() {
    let mut r = rng(31);
    for _ in 0..5 {
        let h = random_hermitian(8, &mut r);
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        assert!(vecs.unitary_residual() < 1e-10);
        let lambda = ComplexMatrix::from_fn(8, 8, |i, j| {
            if i == j {
                Complex64::new(vals[i], 0.0)
            } else {
                C_ZERO
            }
        });
        let rebuilt = &(&vecs * &lambda) * &vecs.adjoint();
        assert!(rebuilt.max_abs_diff(&h) < 1e-9);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn hermitian_eig_rejects_non_hermitian() {
    let mut m = ComplexMatrix::identity(2);
    m[(0, 1)] = Complex64::new(0.5, 0.0);
    assert!(matches!(
        hermitian_eig(&m),
        Err(Error::NotHermitian { .. })
    ));
}

#[test]
fn psd_sqrt_identity_and_diagonal() {
    let i4 = ComplexMatrix::identity(4);
    assert!(psd_sqrt(&i4).unwrap().max_abs_diff(&i4) < 1e-14);

    let m = ComplexMatrix::from_real(2, 2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
    let expected = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
    assert!(psd_sqrt(&m).unwrap().max_abs_diff(&expected) < 1e-13);
}

#[test]
fn psd_sqrt_squares_back() {
    let mut r = rng(41);
    for _ in 0..5 {
        let m = random_psd(4, false, &mut r);
        let root = psd_sqrt(&m).unwrap();
        assert!(root.hermitian_residual() < 1e-12);
        assert!((&root * &root).max_abs_diff(&m) < 1e-9);
    }
}

#[test]
fn psd_sqrt_rejects_negative_matrix() {
    let m = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
    assert!(matches!(
        psd_sqrt(&m),
        Err(Error::NotPositiveSemidefinite { .. })
    ));
}

#[test]
fn haar_unitary_is_unitary_with_unit_determinant_modulus() {
    let mut r = rng(51);
    for d in [2usize, 4, 8] {
        let u = haar_unitary(d, &mut r);
        assert!(u.unitary_residual() < 1e-12);
        assert!((determinant(&u).norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn haar_unitary_is_deterministic_per_seed() {
    let a = haar_unitary(4, &mut rng(7));
    let b = haar_unitary(4, &mut rng(7));
    assert_eq!(a, b);
    let c = haar_unitary(4, &mut rng(8));
    assert!(a.max_abs_diff(&c) > 1e-3);
}

#[test]
fn haar_unitary_first_entry_moment_matches_haar() {
    // E |U_00|^2 = 1/d; for d = 2 the variance is 1/12, so three standard
    // errors over 10^4 samples is 0.0087.
    let mut r = rng(52);
    let samples = 10_000;
    let mut total = 0.0;
    for _ in 0..samples {
        let u = haar_unitary(2, &mut r);
        total += u[(0, 0)].norm_sqr();
    }
    let mean = total / samples as f64;
    assert!((mean - 0.5).abs() < 0.0087, "mean {mean}");
}

#[test]
fn haar_pure_state_properties() {
    let mut r = rng(53);
    let psi = haar_pure_state(2, &mut r);
    assert!((psi.norm() - 1.0).abs() < 1e-12);
    let again = haar_pure_state(2, &mut rng(53));
    assert_eq!(psi, again);
}

#[test]
fn haar_pure_state_mean_projector_is_maximally_mixed() {
    // Mean of |psi><psi| is I/4; per-entry three standard errors over 10^4
    // samples stay below 0.006.
    let mut r = rng(54);
    let samples = 10_000;
    let mut acc = ComplexMatrix::zeros(4, 4);
    for _ in 0..samples {
        let psi = haar_pure_state(2, &mut r);
        acc = &acc + &psi.projector();
    }
    let mean = acc.scale(Complex64::new(1.0 / samples as f64, 0.0));
    let expected = ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0));
    assert!(mean.max_abs_diff(&expected) < 0.006);
}

#[test]
fn embed_identity_is_identity() {
    let u = ComplexMatrix::identity(4);
    let out = embed_on_qubits(&u, &[2, 3], 4).unwrap();
    assert!(out.max_abs_diff(&ComplexMatrix::identity(16)) < 1e-15);
}

#[test]
fn embed_bit_flip_on_second_qubit() {
    let out = embed_on_qubits(&pauli_x(), &[2], 2).unwrap();
    // |00> -> |01>.
    assert_eq!(out[(1, 0)], C_ONE);
    assert_eq!(out[(0, 1)], C_ONE);
    assert_eq!(out[(2, 3)], C_ONE);
    assert_eq!(out[(0, 0)], C_ZERO);
}

#[test]
fn embed_matches_kron_on_leading_qubits() {
    let mut r = rng(61);
    let u = haar_unitary(8, &mut r);
    let embedded = embed_on_qubits(&u, &[1, 2, 3], 4).unwrap();
    let expected = kron(&u, &ComplexMatrix::identity(2));
    assert!(embedded.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn embed_is_multiplicative() {
    let mut r = rng(62);
    let u = haar_unitary(4, &mut r);
    let v = haar_unitary(4, &mut r);
    let positions = [3, 1];
    let lhs = &embed_on_qubits(&u, &positions, 3).unwrap()
        * &embed_on_qubits(&v, &positions, 3).unwrap();
    let rhs = embed_on_qubits(&(&u * &v), &positions, 3).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-13);
}

#[test]
fn embed_rejects_bad_arguments() {
    let u = ComplexMatrix::identity(4);
    assert!(embed_on_qubits(&u, &[1, 1], 3).is_err());
    assert!(embed_on_qubits(&u, &[1], 3).is_err());
    assert!(matches!(
        embed_on_qubits(&u, &[1, 5], 3),
        Err(Error::IndexOutOfRange { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_kron_mixed_product(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_complex_matrix(2, &mut r);
        let b = random_complex_matrix(3, &mut r);
        let c = random_complex_matrix(2, &mut r);
        let d = random_complex_matrix(3, &mut r);
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn prop_haar_unitary_columns_orthonormal(seed in 0u64..1000) {
        let u = haar_unitary(8, &mut rng(seed));
        prop_assert!(u.unitary_residual() < 1e-12);
    }

    #[test]
    fn prop_partial_trace_preserves_trace(seed in 0u64..1000) {
        let mut r = rng(seed);
        let rho = DensityMatrix::new(random_psd(8, true, &mut r)).unwrap();
        let reduced = partial_trace(&rho, &[2]).unwrap();
        let tr = reduced.matrix().trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-12);
        prop_assert!(reduced.matrix().hermitian_residual() < 1e-12);
    }
}
