//! Composite parameterization of the unitary group `U(d)` with exact
//! analytic derivatives.
//!
//! A `d x d` real parameter matrix `lambda` defines the unitary
//!
//! ```text
//! U = [ prod_{m=1}^{d-1} prod_{n=m+1}^{d}
//!         exp(i lambda[n,m] P_n) * exp(i lambda[m,n] Y_{m,n}) ]
//!     * [ prod_{l=1}^{d} exp(i lambda[l,l] P_l) ]
//! ```
//!
//! with left-to-right products, `P_l = |l-1><l-1|`, and the antisymmetric
//! rotation generators `Y_{m,n} = -i|m-1><n-1| + i|n-1><m-1|` (1-based
//! indices `m < n`, 0-based kets). Diagonal entries of `lambda` are global
//! phases, upper-right entries are rotations in the `(m,n)` plane, and
//! lower-left entries are relative phases.
//!
//! Every parameter has an exact derivative `dU/dlambda[x,y] = i U Ytilde`
//! where the Hermitian generator `Ytilde` is the factor's bare generator
//! (`P` or `Y`) conjugated by the product of all factors strictly to its
//! right in the expansion above. This suffix-product rule is the convention
//! used throughout this crate; it is validated against central finite
//! differences for every `(x, y)` in the test suite. One backward pass over
//! the factor sequence yields the unitary and all `d^2` generators at once.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C_I};

/// Real `d x d` parameter matrix for one perceptron unitary.
///
/// Canonical ranges are `[0, 2pi]` for diagonal and lower-left entries and
/// `[0, pi/2]` for upper-right entries, but values are stored unconstrained:
/// optimization is free to leave the canonical box.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamMatrix {
    d: usize,
    lambda: Vec<f64>,
}

impl ParamMatrix {
    /// All-zero parameters; the unitary is the identity.
    pub fn zeros(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "parameter matrix needs d >= 2, got {d}"
            )));
        }
        Ok(Self {
            d,
            lambda: alloc::vec![0.0; d * d],
        })
    }

    /// Builds from row-major values, rejecting non-finite entries.
    pub fn from_values(d: usize, values: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "parameter matrix needs d >= 2, got {d}"
            )));
        }
        if values.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, lambda: values })
    }

    /// Independent uniform draws over the canonical ranges.
    pub fn random_canonical(d: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut p = Self::zeros(d)?;
        for x in 1..=d {
            for y in 1..=d {
                let hi = if x < y {
                    core::f64::consts::FRAC_PI_2
                } else {
                    core::f64::consts::TAU
                };
                p.set(x, y, rng.gen_range(0.0..hi));
            }
        }
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Parameter at 1-based slot `(x, y)`.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x >= 1 && x <= self.d && y >= 1 && y <= self.d);
        self.lambda[(x - 1) * self.d + (y - 1)]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        assert!(x >= 1 && x <= self.d && y >= 1 && y <= self.d);
        self.lambda[(x - 1) * self.d + (y - 1)] = value;
    }

    /// Row-major view of all `d^2` parameters.
    pub fn values(&self) -> &[f64] {
        &self.lambda
    }

    /// `lambda <- lambda + eps * delta`, entry-wise over row-major slices.
    pub fn add_scaled(&mut self, delta: &[f64], eps: f64) {
        debug_assert_eq!(delta.len(), self.lambda.len());
        for (l, &g) in self.lambda.iter_mut().zip(delta.iter()) {
            *l += eps * g;
        }
    }
}

/// The three elementary factor families of the parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementaryKind {
    /// `exp(i lambda P_l)`: global phase on basis state `|l-1>`.
    Phase(usize),
    /// `exp(i lambda Y_{m,n})`, `m < n`: rotation in the `(m,n)` plane.
    Rotation(usize, usize),
    /// `exp(i lambda P_n)` attached to slot `(n, m)`, `n > m`: relative
    /// phase in the `(m,n)` plane. Same matrix form as `Phase(n)`.
    RelativePhase(usize, usize),
}

/// Dense matrix of one elementary factor.
///
/// Closed forms: `exp(i lambda P_l) = I + (e^{i lambda} - 1) P_l`;
/// `exp(i lambda Y_{m,n})` is the identity outside the `(m,n)` plane and
/// `[[cos, sin], [-sin, cos]]` inside it.
pub fn elementary_factor(lambda: f64, kind: ElementaryKind, d: usize) -> Result<ComplexMatrix> {
    let check = |idx: usize| -> Result<()> {
        if idx == 0 || idx > d {
            Err(Error::IndexOutOfRange { index: idx, limit: d })
        } else {
            Ok(())
        }
    };
    match kind {
        ElementaryKind::Phase(l) => {
            check(l)?;
            Ok(phase_matrix(lambda, l, d))
        }
        ElementaryKind::RelativePhase(n, m) => {
            check(n)?;
            check(m)?;
            if m >= n {
                return Err(Error::InvalidArgument(alloc::format!(
                    "relative phase needs n > m, got ({n}, {m})"
                )));
            }
            Ok(phase_matrix(lambda, n, d))
        }
        ElementaryKind::Rotation(m, n) => {
            check(m)?;
            check(n)?;
            if m >= n {
                return Err(Error::InvalidArgument(alloc::format!(
                    "rotation needs m < n, got ({m}, {n})"
                )));
            }
            Ok(rotation_matrix(lambda, m, n, d))
        }
    }
}

fn phase_matrix(lambda: f64, l: usize, d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(d);
    m[(l - 1, l - 1)] = Complex64::from_polar(1.0, lambda);
    m
}

fn rotation_matrix(lambda: f64, lo: usize, hi: usize, d: usize) -> ComplexMatrix {
    let (c, s) = (lambda.cos(), lambda.sin());
    let mut m = ComplexMatrix::identity(d);
    m[(lo - 1, lo - 1)] = Complex64::new(c, 0.0);
    m[(lo - 1, hi - 1)] = Complex64::new(s, 0.0);
    m[(hi - 1, lo - 1)] = Complex64::new(-s, 0.0);
    m[(hi - 1, hi - 1)] = Complex64::new(c, 0.0);
    m
}

/// Internal factor descriptor: which elementary matrix, which parameter slot.
#[derive(Debug, Clone, Copy)]
struct Factor {
    /// Phase level `l` (Some) or rotation plane (None, see `plane`).
    phase_level: Option<usize>,
    /// Rotation plane `(m, n)` when `phase_level` is None.
    plane: (usize, usize),
    /// 1-based parameter slot `(x, y)` owning this factor.
    slot: (usize, usize),
}

/// The full left-to-right factor sequence of the parameterization.
fn factor_sequence(d: usize) -> Vec<Factor> {
    let mut seq = Vec::with_capacity(d * d);
    for m in 1..d {
        for n in (m + 1)..=d {
            seq.push(Factor {
                phase_level: Some(n),
                plane: (m, n),
                slot: (n, m),
            });
            seq.push(Factor {
                phase_level: None,
                plane: (m, n),
                slot: (m, n),
            });
        }
    }
    for l in 1..=d {
        seq.push(Factor {
            phase_level: Some(l),
            plane: (l, l),
            slot: (l, l),
        });
    }
    seq
}

/// In-place left multiplication `s <- F s` by one elementary factor.
fn apply_factor_left(s: &mut ComplexMatrix, factor: &Factor, angle: f64) {
    match factor.phase_level {
        Some(l) => {
            let phase = Complex64::from_polar(1.0, angle);
            for entry in s.row_mut(l - 1) {
                *entry *= phase;
            }
        }
        None => {
            let (m, n) = factor.plane;
            let (c, sn) = (angle.cos(), angle.sin());
            let d = s.cols();
            for k in 0..d {
                let top = s[(m - 1, k)];
                let bot = s[(n - 1, k)];
                s[(m - 1, k)] = top * c + bot * sn;
                s[(n - 1, k)] = top * (-sn) + bot * c;
            }
        }
    }
}

/// `S^dagger G S` for the factor's bare generator `G`, using only the rows
/// of `S` that `G` touches.
fn conjugated_generator(s: &ComplexMatrix, factor: &Factor) -> ComplexMatrix {
    let d = s.cols();
    match factor.phase_level {
        Some(l) => {
            // G = P_l: Ytilde[i,j] = conj(S[l-1,i]) S[l-1,j].
            let row = s.row(l - 1);
            ComplexMatrix::from_fn(d, d, |i, j| row[i].conj() * row[j])
        }
        None => {
            // G = Y_{m,n} = -i|m-1><n-1| + i|n-1><m-1|.
            let (m, n) = factor.plane;
            let rm = s.row(m - 1);
            let rn = s.row(n - 1);
            ComplexMatrix::from_fn(d, d, |i, j| {
                -C_I * rm[i].conj() * rn[j] + C_I * rn[i].conj() * rm[j]
            })
        }
    }
}

/// Hermitian generator attached to one parameter slot.
#[derive(Debug, Clone)]
pub struct GeneratorResult {
    pub y_tilde: ComplexMatrix,
    pub x: usize,
    pub y: usize,
}

/// The unitary together with all `d^2` generators, from one shared pass.
#[derive(Debug, Clone)]
pub struct ParamGenerators {
    pub unitary: ComplexMatrix,
    /// Row-major by slot: `y_tildes[(x-1)*d + (y-1)]`.
    pub y_tildes: Vec<ComplexMatrix>,
}

/// Builds the parameterized unitary.
pub fn build_unitary(p: &ParamMatrix) -> ComplexMatrix {
    let d = p.d();
    let mut s = ComplexMatrix::identity(d);
    for factor in factor_sequence(d).iter().rev() {
        apply_factor_left(&mut s, factor, p.get(factor.slot.0, factor.slot.1));
    }
    s
}

/// Unitary and all generators in one backward pass over the factors.
///
/// At each factor, the running suffix product (everything to its right) is
/// exactly the conjugation that turns the bare generator into the slot's
/// `Ytilde`, so the whole table costs one extra `O(d^2)` outer product per
/// parameter.
pub fn all_generators(p: &ParamMatrix) -> ParamGenerators {
    let d = p.d();
    let mut s = ComplexMatrix::identity(d);
    let mut y_tildes: Vec<Option<ComplexMatrix>> = alloc::vec![None; d * d];
    for factor in factor_sequence(d).iter().rev() {
        let (x, y) = factor.slot;
        y_tildes[(x - 1) * d + (y - 1)] = Some(conjugated_generator(&s, factor));
        apply_factor_left(&mut s, factor, p.get(x, y));
    }
    ParamGenerators {
        unitary: s,
        y_tildes: y_tildes
            .into_iter()
            .map(|g| g.expect("every slot owns exactly one factor"))
            .collect(),
    }
}

/// Hermitian generator for slot `(x, y)`: `dU/dlambda[x,y] = i U Ytilde`.
pub fn generator(p: &ParamMatrix, x: usize, y: usize) -> Result<GeneratorResult> {
    let d = p.d();
    if x == 0 || x > d {
        return Err(Error::IndexOutOfRange { index: x, limit: d });
    }
    if y == 0 || y > d {
        return Err(Error::IndexOutOfRange { index: y, limit: d });
    }
    let mut s = ComplexMatrix::identity(d);
    for factor in factor_sequence(d).iter().rev() {
        if factor.slot == (x, y) {
            return Ok(GeneratorResult {
                y_tilde: conjugated_generator(&s, factor),
                x,
                y,
            });
        }
        apply_factor_left(&mut s, factor, p.get(factor.slot.0, factor.slot.1));
    }
    unreachable!("factor sequence covers every slot");
}

/// Exact derivative `dU/dlambda[x,y] = i * U * Ytilde`.
pub fn unitary_derivative(p: &ParamMatrix, x: usize, y: usize) -> Result<ComplexMatrix> {
    let gen = generator(p, x, y)?;
    let u = build_unitary(p);
    Ok((&u * &gen.y_tilde).scale(C_I))
}
