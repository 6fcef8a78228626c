//! Small dense complex linear algebra: products, adjoints, eigensolvers,
//! the propagator exp(−i t A) and Hermitian square roots.

pub mod eigen;
pub mod expm;
pub mod matrix;

pub use eigen::{condition_number, eig_general, eig_hermitian, EigenDecomposition};
pub use expm::{expm, mat_exp};
pub use matrix::{
    inner, sigma_x, sigma_y, sigma_z, vec_dist_max, vec_norm, ComplexMatrix, C64, I, ONE, ZERO,
};

use crate::error::{Error, Result};

/// Exact-Hermiticity threshold used when deciding which propagator route to take.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Accepted Hermiticity defect (relative to the largest entry) for Hermitian-only routines.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;
/// Spectral residual tolerance.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Tolerance for the evolution identities.
pub const EVOLUTION_TOL: f64 = 1e-8;
/// Eigenvector-matrix condition number above which a matrix counts as non-diagonalizable.
pub const DEFECTIVE_CONDITION: f64 = 1e8;
/// Eigenvalues of a PSD matrix may dip this far below zero before it is rejected.
pub const PSD_TOL: f64 = 1e-12;

/// Max-entry norm of A − A†.
pub fn hermitian_defect(a: &ComplexMatrix) -> Result<f64> {
    let n = a.require_square("hermitian_defect input")?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    Ok(worst)
}

/// Max-entry norm of A + A†.
pub fn antihermitian_defect(a: &ComplexMatrix) -> Result<f64> {
    let n = a.require_square("antihermitian_defect input")?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] + a[(j, i)].conj()).norm());
        }
    }
    Ok(worst)
}

/// Hermitian positive-semidefinite square root.
pub fn herm_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(a)?;
    let scale = e.values.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
    let lowest = e.values.first().map_or(0.0, |z| z.re);
    if lowest < -PSD_TOL * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: lowest,
        });
    }
    let roots: Vec<C64> = e
        .values
        .iter()
        .map(|z| C64::new(z.re.max(0.0).sqrt(), 0.0))
        .collect();
    let b = &(&e.vectors * &ComplexMatrix::diag(&roots)) * &e.vectors.adjoint();
    Ok(b.hermitian_part())
}
