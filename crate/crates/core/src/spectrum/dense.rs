//! Dense `2^N x 2^N` Hamiltonian in the product basis, built directly from
//! Pauli operators. Used only as an oracle for the sector enumeration.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

use super::check_n;

pub const DENSE_MAX_N: u32 = 12;

/// `H = -(1/N) sum_{i<j} (sx_i sx_j + sy_i sy_j) - h sum_i sz_i`.
///
/// Basis index bit `i` set means spin `i` up. The in-plane exchange flips an
/// antiparallel pair with amplitude 2, giving off-diagonal entries `-2/N`.
pub fn dense_hamiltonian(n: u32, h: f64) -> Result<DMatrix<f64>> {
    check_n(n)?;
    if n > DENSE_MAX_N {
        return Err(Error::Resource(format!("dense Hamiltonian limited to N <= {DENSE_MAX_N}, got {n}")));
    }
    let dim = 1usize << n;
    let hop = -2.0 / f64::from(n);
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        let up = b.count_ones() as f64;
        m[(b, b)] = -h * (2.0 * up - f64::from(n));
        for i in 0..n {
            for j in (i + 1)..n {
                if ((b >> i) ^ (b >> j)) & 1 == 1 {
                    let c = b ^ (1 << i) ^ (1 << j);
                    m[(c, b)] = hop;
                }
            }
        }
    }
    Ok(m)
}

/// Eigenvalues of [`dense_hamiltonian`], sorted ascending.
pub fn dense_eigenvalues(n: u32, h: f64) -> Result<Vec<f64>> {
    let m = dense_hamiltonian(n, h)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
