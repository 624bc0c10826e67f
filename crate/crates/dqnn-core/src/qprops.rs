//! Quantum-information functionals: fidelities, purity, concurrence,
//! measurement entropies, and uncertainty-relation bounds.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, pauli_y, psd_sqrt, ComplexMatrix, DensityMatrix, PureState, C_ZERO,
};

const HERM_INPUT_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

/// One evaluation of the Robertson inequality
/// `delta_a * delta_b >= 1/2 |<[A, B]>|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyRecord {
    pub delta_a: f64,
    pub delta_b: f64,
    pub lower_bound: f64,
    /// Always `delta_a * delta_b`.
    pub product: f64,
    /// `product - lower_bound`; at least `-1e-10` for every valid record.
    pub slack: f64,
}

impl UncertaintyRecord {
    pub fn new(delta_a: f64, delta_b: f64, lower_bound: f64) -> Self {
        let product = delta_a * delta_b;
        Self {
            delta_a,
            delta_b,
            lower_bound,
            product,
            slack: product - lower_bound,
        }
    }
}

/// Orthonormal eigenbasis of a non-degenerate observable, stored as columns.
#[derive(Debug, Clone)]
pub struct ObservableBasis {
    vectors: ComplexMatrix,
}

impl ObservableBasis {
    /// Validates that the columns are orthonormal within `1e-10`.
    pub fn new(vectors: ComplexMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::DimensionMismatch {
                expected: vectors.rows(),
                actual: vectors.cols(),
            });
        }
        let residual = vectors.unitary_residual();
        if !(residual <= ORTHO_TOL) {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis columns not orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Self { vectors })
    }

    /// Eigenbasis of a Hermitian observable.
    pub fn from_hermitian(observable: &ComplexMatrix) -> Result<Self> {
        let (_, vectors) = hermitian_eig(observable)?;
        Self::new(vectors)
    }

    pub fn d(&self) -> usize {
        self.vectors.rows()
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// `<chi_i | psi>` for column `i`.
    fn overlap(&self, i: usize, psi: &[Complex64]) -> Complex64 {
        let d = self.d();
        let mut acc = C_ZERO;
        for k in 0..d {
            acc += self.vectors[(k, i)].conj() * psi[k];
        }
        acc
    }
}

fn clamp_radicand(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NotPositiveSemidefinite { eigenvalue: x })
    }
}

/// Square roots of a PSD spectrum, ascending. Eigenvalues within roundoff of
/// zero are zeroed before the root: `sqrt` of noise-level values would
/// otherwise contaminate rank-deficient spectra at the `1e-8` scale.
fn sqrt_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (values, _) = hermitian_eig(m)?;
    let scale = values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let floor = scale * 1e-12;
    values
        .into_iter()
        .map(|v| {
            if v < -1e-8 {
                Err(Error::NotPositiveSemidefinite { eigenvalue: v })
            } else if v <= floor {
                Ok(0.0)
            } else {
                Ok(v.sqrt())
            }
        })
        .collect()
}

fn clamp_unit_interval(x: f64) -> f64 {
    x.max(0.0).min(1.0)
}

/// General fidelity `F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity_general(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let root = psd_sqrt(rho.matrix())?;
    let inner = &(&root * sigma.matrix()) * &root;
    let tr: f64 = sqrt_spectrum(&inner)?.iter().sum();
    Ok(clamp_unit_interval(tr * tr))
}

/// Qubit shortcut `F = Tr(rho sigma) + 2 sqrt(det rho det sigma)`.
pub fn fidelity_qubit(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    if sigma.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: sigma.dim(),
        });
    }
    let overlap = (rho.matrix() * sigma.matrix()).trace().re;
    let det = |m: &ComplexMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let det_rho = clamp_radicand(det(rho.matrix()))?;
    let det_sigma = clamp_radicand(det(sigma.matrix()))?;
    Ok(clamp_unit_interval(
        overlap + 2.0 * (det_rho * det_sigma).sqrt(),
    ))
}

/// `<phi| rho |phi>`: fidelity of a pure target with a mixed output.
pub fn fidelity_pure_mixed(phi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if phi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            actual: rho.dim(),
        });
    }
    let image = rho.matrix().mul_vec(phi.amplitudes());
    let mut acc = C_ZERO;
    for (a, b) in phi.amplitudes().iter().zip(image.iter()) {
        acc += a.conj() * b;
    }
    Ok(clamp_unit_interval(acc.re))
}

/// Two-qubit purity `P = (4/3)(Tr rho^2 - 1/4)`: 0 for maximally mixed,
/// 1 for pure.
pub fn purity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let tr_sq = (rho.matrix() * rho.matrix()).trace().re;
    Ok(clamp_unit_interval(4.0 / 3.0 * (tr_sq - 0.25)))
}

/// Two-qubit concurrence of a pure state: `|<psi| sigma_y x sigma_y |psi*>|`.
pub fn concurrence_pure(psi: &PureState) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    // sigma_y x sigma_y maps |00>->-|11>, |01>->|10>, |10>->|01>, |11>->-|00>.
    let overlap = 2.0 * (a[1] * a[2] - a[0] * a[3]).norm();
    Ok(clamp_unit_interval(overlap))
}

/// Two-qubit concurrence of a mixed state via the spin-flipped spectrum:
/// the largest eigenvalue of `sqrt(sqrt(rho) rho_tilde sqrt(rho))` minus the
/// other three, floored at zero.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped = &(&yy * &rho.matrix().conjugated()) * &yy;
    let root = psd_sqrt(rho.matrix())?;
    let inner = &(&root * &flipped) * &root;
    // Ascending square roots: the last is the largest.
    let mu = sqrt_spectrum(&inner)?;
    Ok(clamp_unit_interval(mu[3] - mu[2] - mu[1] - mu[0]))
}

/// Measurement entropy `S = -sum_a p_a log_d p_a` with `p_a = |<chi_a|psi>|^2`
/// and the logarithm in base `d`, so the value lies in `[0, 1]`.
pub fn measurement_entropy(psi: &PureState, basis: &ObservableBasis) -> Result<f64> {
    if psi.dim() != basis.d() {
        return Err(Error::DimensionMismatch {
            expected: basis.d(),
            actual: psi.dim(),
        });
    }
    let d = basis.d();
    let ln_d = (d as f64).ln();
    let mut entropy = 0.0;
    for i in 0..d {
        let p = basis.overlap(i, psi.amplitudes()).norm_sqr();
        if p > 0.0 {
            entropy -= p * p.ln() / ln_d;
        }
    }
    Ok(clamp_unit_interval(entropy))
}

/// State-independent entropic bound `-log_d max_{i,j} |<chi_a^i|chi_b^j>|^2`
/// for two measurement bases; `S(A) + S(B)` dominates it for every state.
pub fn entropic_bound(basis_a: &ObservableBasis, basis_b: &ObservableBasis) -> Result<f64> {
    if basis_a.d() != basis_b.d() {
        return Err(Error::DimensionMismatch {
            expected: basis_a.d(),
            actual: basis_b.d(),
        });
    }
    let overlaps = &basis_a.vectors().adjoint() * basis_b.vectors();
    let mut max_sq = 0.0_f64;
    for z in overlaps.data() {
        max_sq = max_sq.max(z.norm_sqr());
    }
    let d = basis_a.d() as f64;
    Ok((-(max_sq.min(1.0).ln()) / d.ln()).max(0.0))
}

/// Standard deviation of a Hermitian observable in a pure state, together
/// with `A|psi>` for reuse.
fn deviation(observable: &ComplexMatrix, psi: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    let image = observable.mul_vec(psi);
    let mut mean = C_ZERO;
    let mut second = 0.0;
    for (a, b) in psi.iter().zip(image.iter()) {
        mean += a.conj() * b;
        second += b.norm_sqr();
    }
    let radicand = clamp_radicand(second - mean.norm_sqr())?;
    Ok((radicand.sqrt(), image))
}

/// `(delta_a, delta_b, lower_bound)` without input validation; `psi` must be
/// normalized and `a`, `b` Hermitian.
pub(crate) fn robertson_components(
    psi: &[Complex64],
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<(f64, f64, f64)> {
    let (delta_a, a_psi) = deviation(a, psi)?;
    let (delta_b, b_psi) = deviation(b, psi)?;
    // <psi|[A,B]|psi> = 2i Im <A psi | B psi> for Hermitian A, B.
    let mut cross = C_ZERO;
    for (u, v) in a_psi.iter().zip(b_psi.iter()) {
        cross += u.conj() * v;
    }
    Ok((delta_a, delta_b, cross.im.abs()))
}

/// Robertson uncertainty record for Hermitian `a`, `b` in the state `psi`:
/// `lower_bound = 1/2 |<psi|[a, b]|psi>|`.
pub fn robertson_record(
    psi: &PureState,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<UncertaintyRecord> {
    for m in [a, b] {
        if !m.is_square() || m.rows() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim(),
                actual: m.rows(),
            });
        }
        let residual = m.hermitian_residual();
        if !(residual <= HERM_INPUT_TOL) {
            return Err(Error::NotHermitian { residual });
        }
    }
    let (delta_a, delta_b, lower_bound) = robertson_components(psi.amplitudes(), a, b)?;
    Ok(UncertaintyRecord::new(delta_a, delta_b, lower_bound))
}
