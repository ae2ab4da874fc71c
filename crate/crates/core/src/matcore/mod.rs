//! Dense real linear algebra for the small symmetric matrices that covariance
//! calculus produces (dimension 2n, n a handful of modes).
//!
//! Every matrix inequality is decided numerically against the relative threshold
//! `-tol · (1 + ‖·‖_F)`. Hermitian forms `A + iB` are never formed as complex
//! matrices: they are embedded in the real doubled matrix `[[A, -B], [B, A]]`,
//! whose spectrum is that of `A + iB` with every eigenvalue repeated twice.

mod eigen;
mod matrix;

pub use eigen::{sym_eigen, SymEigen};
pub use matrix::{RealMatrix, SymMatrix};

use crate::error::{invalid, mismatch, Result};

/// Default relative tolerance for PSD decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

const SKEW_TOL: f64 = 1e-12;

/// Smallest eigenvalue and the threshold it is compared against.
fn psd_margin(m: &SymMatrix, tol: f64) -> Option<(f64, f64)> {
    let e = sym_eigen(m).ok()?;
    Some((e.min(), -tol * (1.0 + m.frobenius_norm())))
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    Ok(sym_eigen(m)?.min())
}

/// `true` iff the smallest eigenvalue is at least `-tol · (1 + ‖m‖_F)`.
///
/// A solver failure is reported as "not PSD".
pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    debug_assert!(tol >= 0.0);
    psd_margin(m, tol).is_some_and(|(min, threshold)| min >= threshold)
}

/// Real embedding `[[A, -B], [B, A]]` of the Hermitian matrix `A + iB`.
pub fn hermitian_doubling(a: &SymMatrix, b: &RealMatrix) -> Result<SymMatrix> {
    let n = a.dim();
    if b.rows() != n || b.cols() != n {
        return Err(mismatch(format!(
            "imaginary part is {}x{}, real part is {n}x{n}",
            b.rows(),
            b.cols()
        )));
    }
    let scale = 1.0 + b.max_abs();
    if b.skew_defect() > SKEW_TOL * scale {
        return Err(invalid("imaginary part of a Hermitian form must be skew-symmetric"));
    }
    let mut d = RealMatrix::zeros(2 * n, 2 * n);
    d.set_block(0, 0, a.as_matrix());
    d.set_block(n, n, a.as_matrix());
    d.set_block(n, 0, b);
    d.set_block(0, n, &-b);
    SymMatrix::new(d)
}

/// Smallest eigenvalue of the Hermitian form `A + iB`.
pub fn hermitian_min_eigenvalue(a: &SymMatrix, b: &RealMatrix) -> Result<f64> {
    min_eigenvalue(&hermitian_doubling(a, b)?)
}

/// Decides `A + iB ⪰ 0` for real symmetric `A` and real skew `B` at tolerance `tol`
/// (relative to the Frobenius norm of the doubled matrix).
pub fn hermitian_psd(a: &SymMatrix, b: &RealMatrix, tol: f64) -> Result<bool> {
    Ok(is_psd(&hermitian_doubling(a, b)?, tol))
}

/// Principal square root of a PSD matrix. Eigenvalues that are negative within
/// tolerance are clamped to zero.
pub fn sym_sqrt(m: &SymMatrix) -> Result<SymMatrix> {
    let e = sym_eigen(m)?;
    let threshold = -DEFAULT_TOL * (1.0 + m.frobenius_norm());
    if e.min() < threshold {
        return Err(invalid(format!(
            "square root needs a PSD matrix, smallest eigenvalue is {:e}",
            e.min()
        )));
    }
    Ok(e.rebuild(|w| w.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta1() -> RealMatrix {
        RealMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&SymMatrix::zeros(3), 1e-9));
        assert!(!is_psd(&SymMatrix::from_diagonal(&[1.0, -1.0]), 1e-9));
    }

    #[test]
    fn vacuum_hermitian_form() {
        // ½I ± (i/2)Δ has spectrum {0, 1}.
        let a = SymMatrix::scaled_identity(2, 0.5);
        let b = delta1().scale(0.5);
        assert!(hermitian_psd(&a, &b, 1e-9).unwrap());
        assert!(hermitian_psd(&a, &-&b, 1e-9).unwrap());
        let d = sym_eigen(&hermitian_doubling(&a, &b).unwrap()).unwrap();
        for (w, expect) in d.values.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((w - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn below_vacuum_rejected() {
        let a = SymMatrix::scaled_identity(2, 0.4);
        let b = delta1().scale(0.5);
        assert!(!hermitian_psd(&a, &b, 1e-9).unwrap());
        let min = hermitian_min_eigenvalue(&a, &b).unwrap();
        assert!((min + 0.1).abs() < 1e-15);
    }

    #[test]
    fn hermitian_argument_errors() {
        let a = SymMatrix::identity(2);
        let not_skew = RealMatrix::identity(2);
        assert!(hermitian_psd(&a, &not_skew, 1e-9).is_err());
        assert!(hermitian_psd(&a, &RealMatrix::zeros(3, 3), 1e-9).is_err());
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sym_sqrt(&SymMatrix::identity(2)).unwrap(), SymMatrix::identity(2));
        let r = sym_sqrt(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((r.get(0, 0) - 2.0).abs() < 1e-15 && (r.get(1, 1) - 3.0).abs() < 1e-15);
        assert_eq!(r.get(0, 1), 0.0);
        assert!(sym_sqrt(&SymMatrix::from_diagonal(&[1.0, -0.5])).is_err());
        // Tiny negative eigenvalue is clamped.
        let r = sym_sqrt(&SymMatrix::from_diagonal(&[1.0, -1e-12])).unwrap();
        assert_eq!(r.get(1, 1), 0.0);
    }
}
