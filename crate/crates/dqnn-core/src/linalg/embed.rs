//! Lifting a small unitary onto chosen qubits of a larger register.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::state::scatter_bits;

/// Embeds a `k`-qubit operator so it acts as `u` on the listed qubits (in
/// listed order, first position = most significant sub-index bit) and as the
/// identity elsewhere.
///
/// Positions are 1-based with qubit 1 the most significant bit of the full
/// register. `embed_on_qubits(u, &[1..=k], n)` equals `kron(u, I)`.
pub fn embed_on_qubits(
    u: &ComplexMatrix,
    positions: &[usize],
    n_total: usize,
) -> Result<ComplexMatrix> {
    let k = positions.len();
    if k == 0 || k > n_total {
        return Err(Error::InvalidArgument(alloc::format!(
            "{k} positions for a {n_total}-qubit register"
        )));
    }
    let sub_dim = 1usize << k;
    if !u.is_square() || u.rows() != sub_dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            actual: u.rows(),
        });
    }
    for (i, &p) in positions.iter().enumerate() {
        if p == 0 || p > n_total {
            return Err(Error::IndexOutOfRange {
                index: p,
                limit: n_total,
            });
        }
        if positions[..i].contains(&p) {
            return Err(Error::InvalidArgument(alloc::format!(
                "duplicate qubit position {p}"
            )));
        }
    }

    let complement: Vec<usize> = (1..=n_total).filter(|q| !positions.contains(q)).collect();
    let rest_dim = 1usize << complement.len();
    let full_dim = 1usize << n_total;

    let mut out = ComplexMatrix::zeros(full_dim, full_dim);
    for rest in 0..rest_dim {
        let rest_bits = scatter_bits(rest, &complement, n_total);
        for a in 0..sub_dim {
            let row = scatter_bits(a, positions, n_total) | rest_bits;
            for b in 0..sub_dim {
                let col = scatter_bits(b, positions, n_total) | rest_bits;
                out[(row, col)] = u[(a, b)];
            }
        }
    }
    Ok(out)
}
