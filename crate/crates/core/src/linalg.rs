//! Shared dense linear algebra helpers on complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-10;

/// Max absolute entry of `m - m†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `(m + m†)/2`, exactly Hermitian.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns, in the
/// same order as the eigenvalues.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m, HERMITICITY_TOL)?;
    let se = hermitize(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok((eigenvalues, vectors))
}

/// Spectral norm via the Gram matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (eigs, _) = hermitian_eigen(&hermitize(&gram)).expect("gram matrix is Hermitian");
    eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Max absolute entry of `m†m - 1`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut dev: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

/// `exp(i·t·h)` for Hermitian `h`, through its eigendecomposition.
pub fn exp_i_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let (eigs, vecs) = hermitian_eigen(h)?;
    let phases = CVector::from_iterator(
        eigs.len(),
        eigs.iter().map(|&e| Complex64::from_polar(1.0, e * t)),
    );
    Ok(&vecs * CMatrix::from_diagonal(&phases) * vecs.adjoint())
}

/// Hermitian generator `A` of a unitary `u = exp(iA)` on the principal branch.
///
/// Uses the Cayley transform `W = i(1-U)(1+U)⁻¹`, which is Hermitian for
/// unitary `U`, and maps eigenphases via `w = tan(θ/2)`. Valid while no
/// eigenphase reaches ±π; callers guarantee this through the norm
/// precondition of the effective-Hamiltonian lemma.
pub fn unitary_log_hermitian(u: &CMatrix) -> Result<CMatrix> {
    let n = u.nrows();
    if n != u.ncols() {
        return Err(Error::DimensionMismatch("unitary log of non-square matrix".into()));
    }
    let udev = unitarity_deviation(u);
    if udev > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "matrix is not unitary (deviation {udev:.3e})"
        )));
    }
    let id = CMatrix::identity(n, n);
    let denom = (&id + u)
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("1+U singular: eigenphase at ±π".into()))?;
    let w = hermitize(&((&id - u) * denom).scale(1.0).map(|z| z * Complex64::i()));
    let (eigs, vecs) = hermitian_eigen(&w)?;
    let angles = CVector::from_iterator(
        eigs.len(),
        eigs.iter().map(|&w| Complex64::new(2.0 * w.atan(), 0.0)),
    );
    Ok(hermitize(&(&vecs * CMatrix::from_diagonal(&angles) * vecs.adjoint())))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
    }

    #[test]
    fn eigen_of_pauli_x() {
        let (eigs, vecs) = hermitian_eigen(&pauli_x()).unwrap();
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-12);
        // Eigenvectors reconstruct the matrix.
        let d = CVector::from_iterator(2, eigs.iter().map(|&e| Complex64::new(e, 0.0)));
        let rec = &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint();
        assert!(hermiticity_deviation(&(rec - pauli_x())) < 1e-12);
    }

    #[test]
    fn exp_log_roundtrip() {
        let h = hermitize(&CMatrix::from_fn(4, 4, |i, j| {
            Complex64::new((i * 7 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02)
        }));
        let u = exp_i_hermitian(&h, 0.5).unwrap();
        assert!(unitarity_deviation(&u) < 1e-12);
        let a = unitary_log_hermitian(&u).unwrap();
        // a should equal 0.5 * h while ‖0.5h‖ < π.
        assert!(spectral_norm(&(a - h.scale(0.5))) < 1e-10);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(-2.5, 0.0),
        ]));
        assert_abs_diff_eq!(spectral_norm(&m), 2.5, epsilon = 1e-12);
    }
}
