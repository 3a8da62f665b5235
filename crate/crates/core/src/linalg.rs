//! Small dense linear-algebra helpers and the complex ↔ real isometry.
//!
//! A complex vector `z ∈ C^k` is identified with `(Re z_1, …, Re z_k, Im z_1, …, Im z_k) ∈ R^{2k}`.
//! Under this identification `Re(x†y)` is the Euclidean inner product, and a complex
//! matrix `M` acts as its real form `[[Re M, −Im M], [Im M, Re M]]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense real matrix.
pub type RMat = DMatrix<f64>;
/// Dense real vector.
pub type RVec = DVector<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

/// Maps `z ∈ C^k` to its real coordinates in `R^{2k}`.
pub fn complex_to_real(z: &CVec) -> RVec {
    let k = z.len();
    RVec::from_fn(2 * k, |i, _| if i < k { z[i].re } else { z[i - k].im })
}

/// Inverse of [`complex_to_real`]; `x` must have even length.
pub fn real_to_complex(x: &RVec) -> CVec {
    let k = x.len() / 2;
    CVec::from_fn(k, |i, _| Complex64::new(x[i], x[i + k]))
}

/// Real form of a complex matrix acting on real coordinates.
pub fn realify(m: &CMat) -> RMat {
    let (r, c) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Complex conjugation expressed on real coordinates (negates the imaginary half).
pub fn conj_real(x: &RVec) -> RVec {
    let k = x.len() / 2;
    RVec::from_fn(x.len(), |i, _| if i < k { x[i] } else { -x[i] })
}

/// `M^p` for a symmetric positive-definite real matrix via its eigendecomposition.
pub fn sym_pow(m: &RMat, p: f64) -> Result<RMat> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix is not positive definite".into(),
        ));
    }
    let d = RMat::from_diagonal(&eig.eigenvalues.map(|l| l.powf(p)));
    let q = &eig.eigenvectors;
    Ok(q * d * q.transpose())
}

/// `M^p` for a Hermitian positive-definite complex matrix.
pub fn herm_pow(m: &CMat, p: f64) -> Result<CMat> {
    let r = sym_pow(&realify(m), p)?;
    let k = m.nrows();
    Ok(CMat::from_fn(k, k, |i, j| {
        Complex64::new(r[(i, j)], r[(i + k, j)])
    }))
}

/// Checks that a complex matrix is Hermitian positive definite.
pub fn is_hermitian_pd(m: &CMat) -> bool {
    if !m.is_square() {
        return false;
    }
    let herm_err = (m - m.adjoint()).norm();
    if herm_err > 1e-10 * (1.0 + m.norm()) {
        return false;
    }
    realify(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .all(|&l| l > 0.0)
}

/// Complex identity matrix scaled by `s`.
pub fn scaled_identity(k: usize, s: f64) -> CMat {
    CMat::from_diagonal_element(k, k, Complex64::new(s, 0.0))
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Exact determinant of a square matrix of `f64` integers, returned as `f64`.
/// Uses Bareiss fraction-free elimination on `i128`.
pub fn integer_det(m: &RMat) -> Result<i128> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::Shape("determinant of non-square matrix".into()));
    }
    let mut a: Vec<Vec<i128>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let v = m[(i, j)];
            if (v - v.round()).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "entry {v} is not an integer"
                )));
            }
            row.push(v.round() as i128);
        }
        a.push(row);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realify_preserves_products() {
        let a = CMat::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 0.3));
        let z = CVec::from_fn(2, |i, _| Complex64::new(1.0 - i as f64, 0.7));
        let lhs = complex_to_real(&(&a * &z));
        let rhs = realify(&a) * complex_to_real(&z);
        assert!((lhs - rhs).norm() < 1e-14);
        assert!((real_to_complex(&complex_to_real(&z)) - z).norm() < 1e-15);
    }

    #[test]
    fn hermitian_square_root_squares_back() {
        let a = CMat::from_fn(2, 2, |i, j| {
            Complex64::new((i + j) as f64, i as f64 - j as f64)
        });
        let m = &a * a.adjoint() + scaled_identity(2, 1.0);
        let s = herm_pow(&m, 0.5).unwrap();
        assert!((&s * &s - &m).norm() < 1e-12);
    }

    #[test]
    fn bareiss_determinant() {
        let m = RMat::from_row_slice(3, 3, &[2.0, 0.0, 1.0, 1.0, 3.0, 2.0, 1.0, 1.0, 1.0]);
        assert_eq!(integer_det(&m).unwrap(), 2 * (3 - 2) + (1 - 3));
        assert_eq!(integer_det(&RMat::identity(4, 4)).unwrap(), 1);
    }
}
