mod common;

use common::{bell_phi_plus, psd_eigenpairs_power, random_hermitian, random_psd, rng, werner};
use dqnn_core::linalg::{
    haar_pure_state, haar_unitary, kron, pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix,
    PureState, C_ZERO,
};
use dqnn_core::qprops::{
    concurrence_mixed, concurrence_pure, entropic_bound, fidelity_general, fidelity_pure_mixed,
    fidelity_qubit, measurement_entropy, purity, robertson_record, ObservableBasis,
};
use dqnn_core::Error;
use num_complex::Complex64;

fn density(m: ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new(m).unwrap()
}

fn random_qubit_density(seed: u64) -> DensityMatrix {
    density(random_psd(2, true, &mut rng(seed)))
}

#[test]
fn fidelity_general_identical_pure_states() {
    let psi = haar_pure_state(2, &mut rng(1));
    let rho = psi.to_density();
    assert!((fidelity_general(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn fidelity_general_orthogonal_states() {
    let zero = PureState::basis(1, 0).unwrap().to_density();
    let one = PureState::basis(1, 1).unwrap().to_density();
    assert!(fidelity_general(&zero, &one).unwrap() < 1e-10);
}

#[test]
fn fidelity_general_matches_qubit_formula() {
    for seed in 0..20u64 {
        let rho = random_qubit_density(2 * seed + 100);
        let sigma = random_qubit_density(2 * seed + 101);
        let general = fidelity_general(&rho, &sigma).unwrap();
        let qubit = fidelity_qubit(&rho, &sigma).unwrap();
        assert!(
            (general - qubit).abs() < 1e-9,
            "general {general} vs qubit {qubit}"
        );
        // Symmetry of both routes.
        assert!((fidelity_general(&sigma, &rho).unwrap() - general).abs() < 1e-9);
        assert!((fidelity_qubit(&sigma, &rho).unwrap() - qubit).abs() < 1e-12);
    }
}

#[test]
fn fidelity_qubit_closed_forms() {
    let mixed = DensityMatrix::maximally_mixed(1);
    assert!((fidelity_qubit(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
    let zero = PureState::basis(1, 0).unwrap().to_density();
    let one = PureState::basis(1, 1).unwrap().to_density();
    assert!(fidelity_qubit(&zero, &one).unwrap() < 1e-12);
}

#[test]
fn fidelity_qubit_rejects_wrong_dimension() {
    let four = DensityMatrix::maximally_mixed(2);
    let two = DensityMatrix::maximally_mixed(1);
    assert!(matches!(
        fidelity_qubit(&four, &two),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn fidelity_pure_mixed_examples() {
    let phi = haar_pure_state(2, &mut rng(3));
    assert!((fidelity_pure_mixed(&phi, &phi.to_density()).unwrap() - 1.0).abs() < 1e-12);

    let basis = PureState::basis(2, 0).unwrap();
    let mixed = DensityMatrix::maximally_mixed(2);
    assert!((fidelity_pure_mixed(&basis, &mixed).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn fidelity_pure_mixed_matches_general() {
    for seed in 0..10u64 {
        let phi = haar_pure_state(1, &mut rng(500 + seed));
        let rho = random_qubit_density(600 + seed);
        let direct = fidelity_pure_mixed(&phi, &rho).unwrap();
        let general = fidelity_general(&phi.to_density(), &rho).unwrap();
        assert!((direct - general).abs() < 1e-9);
    }
}

#[test]
fn purity_endpoints() {
    let pure = haar_pure_state(2, &mut rng(4)).to_density();
    assert!((purity(&pure).unwrap() - 1.0).abs() < 1e-10);
    assert!(purity(&DensityMatrix::maximally_mixed(2)).unwrap() < 1e-10);
}

#[test]
fn purity_werner_half_matches_direct_trace() {
    let w = density(werner(0.5));
    // Direct matrix-product evaluation of (4/3)(Tr rho^2 - 1/4).
    let tr_sq = (w.matrix() * w.matrix()).trace().re;
    let expected = 4.0 / 3.0 * (tr_sq - 0.25);
    assert!((purity(&w).unwrap() - expected).abs() < 1e-12);
    // And the closed-form value for p = 1/2: Tr rho^2 = 1/4 + p^2 3/4.
    assert!((purity(&w).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn concurrence_pure_examples() {
    let bell = PureState::new(bell_phi_plus()).unwrap();
    assert!((concurrence_pure(&bell).unwrap() - 1.0).abs() < 1e-10);

    let product = PureState::basis(2, 0).unwrap();
    assert!(concurrence_pure(&product).unwrap() < 1e-12);

    let amps = vec![
        Complex64::new(0.6, 0.0),
        C_ZERO,
        C_ZERO,
        Complex64::new(0.8, 0.0),
    ];
    let skewed = PureState::new(amps).unwrap();
    assert!((concurrence_pure(&skewed).unwrap() - 0.96).abs() < 1e-12);
}

#[test]
fn concurrence_mixed_pure_and_separable_cases() {
    let bell = PureState::new(bell_phi_plus()).unwrap();
    assert!((concurrence_mixed(&bell.to_density()).unwrap() - 1.0).abs() < 1e-8);
    assert!(concurrence_mixed(&DensityMatrix::maximally_mixed(2)).unwrap() < 1e-8);
}

/// Independent concurrence oracle: power-iteration eigendecompositions only,
/// no shared code with `psd_sqrt` / `hermitian_eig`.
fn concurrence_oracle(rho: &ComplexMatrix) -> f64 {
    let (vals, vecs) = psd_eigenpairs_power(rho);
    let d = rho.rows();
    let mut root = ComplexMatrix::zeros(d, d);
    for (lam, v) in vals.iter().zip(vecs.iter()) {
        let outer = ComplexMatrix::outer(v, v).scale(Complex64::new(lam.max(0.0).sqrt(), 0.0));
        root = &root + &outer;
    }
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped = &(&yy * &rho.conjugated()) * &yy;
    let inner = &(&root * &flipped) * &root;
    // Symmetrize roundoff before extracting the spectrum.
    let sym = ComplexMatrix::from_fn(d, d, |i, j| {
        (inner[(i, j)] + inner[(j, i)].conj()) * Complex64::new(0.5, 0.0)
    });
    let (mu_sq, _) = psd_eigenpairs_power(&sym);
    let mu: Vec<f64> = mu_sq.iter().map(|&x| x.max(0.0).sqrt()).collect();
    (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
}

#[test]
fn concurrence_mixed_werner_grid_matches_oracle() {
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let rho = werner(p);
        let implementation = concurrence_mixed(&density(rho.clone())).unwrap();
        let oracle = concurrence_oracle(&rho);
        let closed_form = ((3.0 * p - 1.0) / 2.0).max(0.0);
        assert!(
            (implementation - oracle).abs() < 1e-8,
            "p={p}: impl {implementation} oracle {oracle}"
        );
        assert!(
            (implementation - closed_form).abs() < 1e-8,
            "p={p}: impl {implementation} closed form {closed_form}"
        );
    }
}

#[test]
fn concurrence_mixed_agrees_with_pure_on_projectors() {
    for seed in 0..50u64 {
        let psi = haar_pure_state(2, &mut rng(900 + seed));
        let from_pure = concurrence_pure(&psi).unwrap();
        let from_mixed = concurrence_mixed(&psi.to_density()).unwrap();
        assert!(
            (from_pure - from_mixed).abs() < 1e-8,
            "pure {from_pure} mixed {from_mixed}"
        );
    }
}

#[test]
fn purity_and_concurrence_invariant_under_local_unitaries() {
    let mut r = rng(5);
    for _ in 0..10 {
        let psi = haar_pure_state(2, &mut r);
        let local = kron(&haar_unitary(2, &mut r), &haar_unitary(2, &mut r));
        let rotated = PureState::new(local.mul_vec(psi.amplitudes())).unwrap();
        assert!(
            (concurrence_pure(&psi).unwrap() - concurrence_pure(&rotated).unwrap()).abs() < 1e-9
        );
        assert!((purity(&psi.to_density()).unwrap() - purity(&rotated.to_density()).unwrap())
            .abs()
            < 1e-9);
    }
}

#[test]
fn measurement_entropy_eigenvector_and_unbiased_cases() {
    let basis = ObservableBasis::new(ComplexMatrix::identity(4)).unwrap();
    let eigen = PureState::basis(2, 2).unwrap();
    assert!(measurement_entropy(&eigen, &basis).unwrap() < 1e-12);

    let unbiased = PureState::new(vec![Complex64::new(0.5, 0.0); 4]).unwrap();
    assert!((measurement_entropy(&unbiased, &basis).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn measurement_entropy_binary_case() {
    let angle = std::f64::consts::FRAC_PI_8;
    let psi = PureState::new(vec![
        Complex64::new(angle.cos(), 0.0),
        Complex64::new(angle.sin(), 0.0),
    ])
    .unwrap();
    let basis = ObservableBasis::new(ComplexMatrix::identity(2)).unwrap();
    let p = angle.cos() * angle.cos();
    let expected = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
    assert!((measurement_entropy(&psi, &basis).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn entropic_bound_identical_and_unbiased_bases() {
    let computational = ObservableBasis::new(ComplexMatrix::identity(2)).unwrap();
    assert!(entropic_bound(&computational, &computational).unwrap() < 1e-12);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard =
        ObservableBasis::new(ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()).unwrap();
    assert!((entropic_bound(&computational, &hadamard).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn entropic_inequality_monte_carlo_d4() {
    let mut r = rng(6);
    for _ in 0..1000 {
        let basis_a = ObservableBasis::new(haar_unitary(4, &mut r)).unwrap();
        let basis_b = ObservableBasis::new(haar_unitary(4, &mut r)).unwrap();
        let bound = entropic_bound(&basis_a, &basis_b).unwrap();
        let psi = haar_pure_state(2, &mut r);
        let sum = measurement_entropy(&psi, &basis_a).unwrap()
            + measurement_entropy(&psi, &basis_b).unwrap();
        assert!(sum >= bound - 1e-10, "sum {sum} < bound {bound}");
    }
}

#[test]
fn robertson_record_pauli_example() {
    let psi = PureState::basis(1, 0).unwrap();
    let record = robertson_record(&psi, &pauli_x(), &pauli_y()).unwrap();
    assert!((record.delta_a - 1.0).abs() < 1e-12);
    assert!((record.delta_b - 1.0).abs() < 1e-12);
    assert!((record.lower_bound - 1.0).abs() < 1e-12);
    assert!(record.slack.abs() < 1e-12);
    assert!((record.product - record.delta_a * record.delta_b).abs() < 1e-15);
}

#[test]
fn robertson_record_commuting_observables() {
    let psi = haar_pure_state(1, &mut rng(7));
    let z = pauli_z();
    let record = robertson_record(&psi, &z, &z).unwrap();
    assert!(record.lower_bound < 1e-12);
}

#[test]
fn robertson_record_rejects_non_hermitian() {
    let psi = PureState::basis(1, 0).unwrap();
    let mut bad = ComplexMatrix::identity(2);
    bad[(0, 1)] = Complex64::new(0.3, 0.0);
    assert!(matches!(
        robertson_record(&psi, &bad, &pauli_z()),
        Err(Error::NotHermitian { .. })
    ));
}

#[test]
fn robertson_inequality_monte_carlo_d16() {
    let mut r = rng(8);
    for _ in 0..200 {
        let a = random_hermitian(16, &mut r);
        let b = random_hermitian(16, &mut r);
        let psi = haar_pure_state(4, &mut r);
        let record = robertson_record(&psi, &a, &b).unwrap();
        assert!(record.slack >= -1e-10, "slack {}", record.slack);
    }
}

#[test]
fn observable_basis_rejects_non_orthonormal_columns() {
    let mut m = ComplexMatrix::identity(3);
    m[(0, 1)] = Complex64::new(0.1, 0.0);
    assert!(ObservableBasis::new(m).is_err());
}
