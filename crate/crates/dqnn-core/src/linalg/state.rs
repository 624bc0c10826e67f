//! Pure states and density matrices on qubit registers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C_ZERO};

const NORM_TOL: f64 = 1e-12;
const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

fn check_qubit_dim(dim: usize) -> Result<u32> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "dimension {dim} is not a power of two >= 2"
        )))
    }
}

/// Normalized state vector on `n` qubits (dimension `2^n`).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates dimension, finiteness, and unit norm (within `1e-12`).
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_dim(amps.len())?;
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !((norm_sq.sqrt() - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidArgument(alloc::format!(
                "state norm {} is not 1",
                norm_sq.sqrt()
            )));
        }
        Ok(Self { amps })
    }

    /// Computational basis state `|index>` on `n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index,
                limit: dim - 1,
            });
        }
        let mut amps = vec![C_ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product; `self` occupies the leading (most significant) qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Entry-wise complex conjugate in the computational basis.
    pub fn conjugated(&self) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Projector `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.projector(),
        }
    }
}

/// Density matrix on a qubit register: Hermitian, unit trace, PSD.
///
/// The constructor checks Hermiticity and trace; positivity is preserved by
/// every operation in this crate and can be asserted explicitly with
/// [`DensityMatrix::min_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                actual: mat.cols(),
            });
        }
        check_qubit_dim(mat.rows())?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = mat.hermitian_residual();
        if !(herm <= HERM_TOL) {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = mat.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidArgument(alloc::format!(
                "trace {} + {}i is not 1",
                tr.re,
                tr.im
            )));
        }
        Ok(Self { mat })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mat = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Smallest eigenvalue; used to assert positivity in tests and checks.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = crate::linalg::eig::hermitian_eig(&self.mat)
            .expect("density matrix is Hermitian by construction");
        vals[0]
    }
}

/// Scatters the bits of `sub` onto the full-register bit positions of the
/// listed qubits; `qubits[0]` receives the most significant bit of `sub`.
pub(crate) fn scatter_bits(sub: usize, qubits: &[usize], n_total: usize) -> usize {
    let k = qubits.len();
    let mut out = 0usize;
    for (pos, &q) in qubits.iter().enumerate() {
        let bit = (sub >> (k - 1 - pos)) & 1;
        out |= bit << (n_total - q);
    }
    out
}

/// Partial trace over the raw matrix of an `n`-qubit operator.
///
/// `traced` must be sorted, deduplicated, and within `1..=n`. The remaining
/// qubits keep their relative order.
pub(crate) fn partial_trace_raw(mat: &ComplexMatrix, n: usize, traced: &[usize]) -> ComplexMatrix {
    let k = traced.len();
    let remaining: Vec<usize> = (1..=n).filter(|q| !traced.contains(q)).collect();
    let m = remaining.len();
    let out_dim = 1usize << m;
    let tr_dim = 1usize << k;

    let rem_offsets: Vec<usize> = (0..out_dim)
        .map(|i| scatter_bits(i, &remaining, n))
        .collect();
    let tr_offsets: Vec<usize> = (0..tr_dim).map(|t| scatter_bits(t, traced, n)).collect();

    ComplexMatrix::from_fn(out_dim, out_dim, |i, j| {
        let mut acc = C_ZERO;
        for &t in &tr_offsets {
            acc += mat[(rem_offsets[i] | t, rem_offsets[j] | t)];
        }
        acc
    })
}

/// Traces out the listed qubits (1-based, qubit 1 = most significant bit).
///
/// Trace and Hermiticity are preserved; the remaining qubits keep their
/// relative order.
pub fn partial_trace(rho: &DensityMatrix, traced_qubits: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let mut traced: Vec<usize> = traced_qubits.to_vec();
    traced.sort_unstable();
    for pair in traced.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidArgument(alloc::format!(
                "duplicate qubit index {}",
                pair[0]
            )));
        }
    }
    for &q in &traced {
        if q == 0 || q > n {
            return Err(Error::IndexOutOfRange { index: q, limit: n });
        }
    }
    if traced.len() >= n {
        return Err(Error::InvalidArgument(
            "cannot trace out every qubit".into(),
        ));
    }
    DensityMatrix::new(partial_trace_raw(rho.matrix(), n, &traced))
}
