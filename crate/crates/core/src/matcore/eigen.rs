use super::{RealMatrix, SymMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `m = V · diag(values) · Vᵀ` with ascending eigenvalues
/// and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Rebuilds `V · diag(f(λ)) · Vᵀ`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mut out = RealMatrix::zeros(n, n);
        for (k, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            if fw == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors.get(i, k) * fw;
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + vi * self.vectors.get(j, k));
                }
            }
        }
        SymMatrix::new(out).expect("square by construction")
    }
}

/// Cyclic Jacobi eigensolver for small dense symmetric matrices.
pub fn sym_eigen(m: &SymMatrix) -> Result<SymEigen> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = RealMatrix::identity(n);
    let norm = a.frobenius_norm();

    let mut converged = norm == 0.0 || n == 1;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Off-diagonal entry below the resolution of both diagonals.
                if sweep > 3 && app.abs() + 1e2 * apq.abs() == app.abs() && aqq.abs() + 1e2 * apq.abs() == aqq.abs() {
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        converged = off <= 1e-15 * norm;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = RealMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(SymEigen { values, vectors })
}

/// One Jacobi rotation `A ← Jᵀ A J` annihilating `a[p][q]`, accumulated into `V ← V J`.
fn rotate(a: &mut RealMatrix, v: &mut RealMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a.get(p, q);
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn residual(m: &SymMatrix, e: &SymEigen) -> f64 {
        (m.as_matrix() - e.rebuild(|w| w).as_matrix()).frobenius_norm()
    }

    #[test]
    fn diagonal_input() {
        let m = SymMatrix::from_diagonal(&[2.0, 1.0]);
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        // Columns are a permutation of the identity.
        assert_eq!(e.vectors.get(1, 0).abs(), 1.0);
        assert_eq!(e.vectors.get(0, 1).abs(), 1.0);
    }

    #[test]
    fn exchange_matrix() {
        let m = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = sym_eigen(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
        assert!(residual(&m, &e) < 1e-14);
    }

    #[test]
    fn zero_and_scalar() {
        let e = sym_eigen(&SymMatrix::zeros(3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let e = sym_eigen(&SymMatrix::from_diagonal(&[7.0])).unwrap();
        assert_eq!(e.values, vec![7.0]);
    }

    #[test]
    fn degenerate_spectrum() {
        // J - I on 4 dims: eigenvalues -1 (x3) and 3.
        let m = SymMatrix::from_rows(&[
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        let e = sym_eigen(&m).unwrap();
        for w in &e.values[..3] {
            assert_abs_diff_eq!(*w, -1.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(e.values[3], 3.0, epsilon = 1e-13);
        assert!(residual(&m, &e) < 1e-13);
    }
}
