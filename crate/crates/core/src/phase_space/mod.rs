//! Gaussian states as covariance/displacement pairs `(ν, d)`.

pub mod symplectic;

use crate::error::{invalid, mismatch, Result};
use crate::matcore::{self, sym_eigen, sym_sqrt, RealMatrix, SymMatrix, DEFAULT_TOL};

/// The symplectic form `Δ = ⊕ⁿ [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    delta: RealMatrix,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("mode count must be at least 1"));
        }
        let mut delta = RealMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            delta.set(2 * i, 2 * i + 1, 1.0);
            delta.set(2 * i + 1, 2 * i, -1.0);
        }
        Ok(Self { n, delta })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.delta
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.delta
    }
}

pub fn make_delta(n: usize) -> Result<SymplecticForm> {
    SymplecticForm::new(n)
}

/// `Δ` for `n` modes; panics on `n == 0`.
pub(crate) fn delta(n: usize) -> RealMatrix {
    SymplecticForm::new(n).expect("mode count checked by caller").into_matrix()
}

/// An `n`-mode Gaussian state `ρ[ν, d]`.
///
/// Construction only checks shapes; physical validity is `validate_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n: usize,
    nu: SymMatrix,
    d: Vec<f64>,
}

impl GaussianState {
    pub fn new(nu: SymMatrix, d: Vec<f64>) -> Result<Self> {
        let dim = nu.dim();
        if !dim.is_multiple_of(2) {
            return Err(mismatch(format!("covariance matrix dimension {dim} is odd")));
        }
        if d.len() != dim {
            return Err(mismatch(format!(
                "displacement has length {}, covariance matrix is {dim}x{dim}",
                d.len()
            )));
        }
        Ok(Self { n: dim / 2, nu, d })
    }

    /// Zero-displacement state with covariance `nu`.
    pub fn centered(nu: SymMatrix) -> Result<Self> {
        let dim = nu.dim();
        Self::new(nu, vec![0.0; dim])
    }

    pub fn vacuum(n: usize) -> Self {
        Self::thermal(&vec![0.5; n])
    }

    /// Product of thermal states with covariances `λᵢ I₂`.
    pub fn thermal(lambdas: &[f64]) -> Self {
        assert!(!lambdas.is_empty(), "need at least one mode");
        let diag: Vec<f64> = lambdas.iter().flat_map(|&l| [l, l]).collect();
        Self::centered(SymMatrix::from_diagonal(&diag)).expect("even dimension")
    }

    /// Two-mode squeezed vacuum `[[c I, s Z], [s Z, c I]]`, `c = cosh(2r)/2`,
    /// `s = sinh(2r)/2`, `Z = diag(1, -1)`.
    pub fn tmsv(r: f64) -> Self {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        let nu = SymMatrix::from_rows(&[
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ])
        .expect("square");
        Self::centered(nu).expect("even dimension")
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> &SymMatrix {
        &self.nu
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn into_parts(self) -> (SymMatrix, Vec<f64>) {
        (self.nu, self.d)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let b = delta(self.n).scale(0.5);
        matcore::hermitian_psd(&self.nu, &b, tol).unwrap_or(false)
    }
}

/// Uncertainty relation `ν + (i/2)Δ ⪰ 0` at the default tolerance.
pub fn validate_state(s: &GaussianState) -> bool {
    s.is_valid(DEFAULT_TOL)
}

/// Symplectic eigenvalues of `nu`, descending.
///
/// `W = √ν Δ √ν` is real antisymmetric with spectrum `{±i d_k}`, so `WᵀW` carries
/// each `d_k²` twice.
pub fn symplectic_eigenvalues(nu: &SymMatrix) -> Result<Vec<f64>> {
    let dim = nu.dim();
    if !dim.is_multiple_of(2) {
        return Err(mismatch(format!("covariance matrix dimension {dim} is odd")));
    }
    let root = sym_sqrt(nu)?;
    let w = root.as_matrix() * &(&delta(dim / 2) * root.as_matrix());
    let wtw = SymMatrix::new(&w.transpose() * &w)?;
    let mut squares = sym_eigen(&wtw)?.values;
    squares.reverse();
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Entropy in nats of a one-mode thermal state with symplectic eigenvalue `d`:
/// `g(d) = (d + ½) ln(d + ½) - (d - ½) ln(d - ½)`, with `g(½) = 0`.
pub fn thermal_entropy(d: f64) -> f64 {
    let nbar = d - 0.5;
    if nbar <= 0.0 {
        return 0.0;
    }
    (nbar + 1.0) * nbar.ln_1p() - nbar * nbar.ln()
}

/// Von Neumann entropy in nats. Displacement does not enter.
pub fn entropy(s: &GaussianState) -> Result<f64> {
    entropy_with(s, DEFAULT_TOL)
}

/// [`entropy`] with the uncertainty relation checked at `tol`.
pub fn entropy_with(s: &GaussianState, tol: f64) -> Result<f64> {
    if !s.is_valid(tol) {
        return Err(invalid("entropy of an invalid state"));
    }
    entropy_of_cm(s.nu())
}

/// Entropy of a covariance matrix assumed valid. Symplectic eigenvalues within
/// rounding of ½ count as pure modes; `g` is steep there, so leftover rounding
/// would otherwise show up as entropy of order 1e-14.
pub(crate) fn entropy_of_cm(nu: &SymMatrix) -> Result<f64> {
    let resolution = 64.0 * f64::EPSILON * (1.0 + nu.max_abs());
    Ok(symplectic_eigenvalues(nu)?
        .into_iter()
        .map(|d| if d - 0.5 <= resolution { 0.0 } else { thermal_entropy(d) })
        .sum())
}

/// Incoherent Gaussian states are products of thermal states: `d = 0` and
/// `ν = ⊕ rᵢ I₂`. Deviations are measured entrywise against `tol · (1 + max|ν|)`.
pub fn is_incoherent_state(s: &GaussianState, tol: f64) -> bool {
    let threshold = tol * (1.0 + s.nu.max_abs());
    incoherence_defect(s) <= threshold
}

/// Largest entrywise distance of `s` from the form `(⊕ rᵢ I₂, 0)`.
pub fn incoherence_defect(s: &GaussianState) -> f64 {
    let nu = &s.nu;
    let mut worst = s.d.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for i in 0..nu.dim() {
        for j in 0..nu.dim() {
            let (mi, mj) = (i / 2, j / 2);
            let dev = if mi != mj || i != j {
                nu.get(i, j).abs()
            } else {
                let r = 0.5 * (nu.get(2 * mi, 2 * mi) + nu.get(2 * mi + 1, 2 * mi + 1));
                (nu.get(i, i) - r).abs()
            };
            worst = worst.max(dev);
        }
    }
    worst
}

pub fn tensor_states(a: &GaussianState, b: &GaussianState) -> GaussianState {
    let nu = a.nu.direct_sum(&b.nu);
    let d = a.d.iter().chain(&b.d).copied().collect();
    GaussianState::new(nu, d).expect("direct sum of even-dimensional blocks")
}

/// Reduced state on `modes` (0-based, in the given order).
pub fn marginal(s: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    if modes.is_empty() {
        return Err(invalid("marginal needs at least one mode"));
    }
    let mut seen = vec![false; s.n];
    for &m in modes {
        if m >= s.n {
            return Err(invalid(format!("mode {m} out of range for {} modes", s.n)));
        }
        if std::mem::replace(&mut seen[m], true) {
            return Err(invalid(format!("mode {m} listed twice")));
        }
    }
    let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    let mut nu = RealMatrix::zeros(idx.len(), idx.len());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            nu.set(a, b, s.nu.get(i, j));
        }
    }
    let d = idx.iter().map(|&i| s.d[i]).collect();
    GaussianState::new(SymMatrix::new(nu)?, d)
}

/// A split of `n` modes into a side `A` (listed) and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<bool>,
}

impl Bipartition {
    pub fn new(n: usize, side_a: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &m in side_a {
            if m >= n {
                return Err(invalid(format!("mode {m} out of range for {n} modes")));
            }
            mask[m] = true;
        }
        Ok(Self { side_a: mask })
    }

    /// First `n_a` modes against the remaining ones.
    pub fn leading(n: usize, n_a: usize) -> Self {
        assert!(n_a <= n);
        Self {
            side_a: (0..n).map(|m| m < n_a).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.side_a.len()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.side_a[mode]
    }
}

/// Frobenius norm of the covariance entries coupling the two sides of `cut`.
pub fn cross_block_norm(nu: &SymMatrix, cut: &Bipartition) -> f64 {
    cross_entries(nu, cut).map(|x| x * x).sum::<f64>().sqrt()
}

fn cross_entries<'a>(nu: &'a SymMatrix, cut: &'a Bipartition) -> impl Iterator<Item = f64> + 'a {
    let dim = nu.dim();
    (0..dim).flat_map(move |i| {
        (0..dim)
            .filter(move |&j| cut.contains(i / 2) != cut.contains(j / 2))
            .map(move |j| nu.get(i, j))
    })
}

/// `true` iff every cross entry of `ν` across `cut` is at most `tol · (1 + ‖ν‖_F)`.
pub fn is_product_state(s: &GaussianState, cut: &Bipartition, tol: f64) -> Result<bool> {
    if cut.modes() != s.n {
        return Err(mismatch(format!(
            "bipartition covers {} modes, state has {}",
            cut.modes(),
            s.n
        )));
    }
    let threshold = tol * (1.0 + s.nu.frobenius_norm());
    Ok(cross_entries(&s.nu, cut).all(|x| x.abs() <= threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_blocks() {
        let d1 = make_delta(1).unwrap();
        assert_eq!(d1.matrix().to_rows(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let d2 = make_delta(2).unwrap();
        assert_eq!(d2.matrix().get(2, 3), 1.0);
        assert_eq!(d2.matrix().get(0, 3), 0.0);
        for n in 1..5 {
            let d = delta(n);
            assert_eq!(&d * &d, RealMatrix::identity(2 * n).scale(-1.0));
        }
        assert!(make_delta(0).is_err());
    }

    #[test]
    fn state_validity() {
        assert!(validate_state(&GaussianState::vacuum(1)));
        assert!(!validate_state(&GaussianState::thermal(&[0.25])));
        // ab = 1.2 ≥ c² + ¼ = 1.06 with a, b > 0.
        let nu = SymMatrix::from_rows(&[[2.0, 0.9], [0.9, 0.6]]).unwrap();
        assert!(validate_state(&GaussianState::centered(nu).unwrap()));
        let nu = SymMatrix::from_rows(&[[1.0, 0.9], [0.9, 1.0]]).unwrap();
        assert!(!validate_state(&GaussianState::centered(nu).unwrap()));
    }

    #[test]
    fn shape_errors() {
        assert!(GaussianState::new(SymMatrix::identity(3), vec![0.0; 3]).is_err());
        assert!(GaussianState::new(SymMatrix::identity(2), vec![0.0; 3]).is_err());
    }

    #[test]
    fn symplectic_eigenvalue_examples() {
        let v = symplectic_eigenvalues(GaussianState::vacuum(1).nu()).unwrap();
        assert_abs_diff_eq!(v[0], 0.5, epsilon = 1e-14);
        let v = symplectic_eigenvalues(GaussianState::thermal(&[3.0]).nu()).unwrap();
        assert_abs_diff_eq!(v[0], 3.0, epsilon = 1e-14);
        let v = symplectic_eigenvalues(GaussianState::tmsv(0.8).nu()).unwrap();
        assert_eq!(v.len(), 2);
        for x in v {
            assert_abs_diff_eq!(x, 0.5, epsilon = 1e-12);
        }
        let v = symplectic_eigenvalues(GaussianState::thermal(&[0.7, 2.0]).nu()).unwrap();
        assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 0.7, epsilon = 1e-14);
        assert!(symplectic_eigenvalues(&SymMatrix::from_diagonal(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&GaussianState::vacuum(2)).unwrap(), 0.0);
        // n̄ = ½: 1.5 ln 1.5 − 0.5 ln 0.5.
        let s = entropy(&GaussianState::thermal(&[1.0])).unwrap();
        assert_abs_diff_eq!(s, 1.5 * 1.5f64.ln() - 0.5 * 0.5f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(s, 0.954771, epsilon = 1e-6);
        let joint = entropy(&GaussianState::thermal(&[1.0, 2.5])).unwrap();
        let parts = thermal_entropy(1.0) + thermal_entropy(2.5);
        assert_abs_diff_eq!(joint, parts, epsilon = 1e-13);
        // Displacement is irrelevant.
        let shifted = GaussianState::new(SymMatrix::identity(2), vec![3.0, -1.0]).unwrap();
        assert_abs_diff_eq!(entropy(&shifted).unwrap(), s, epsilon = 1e-15);
        assert!(entropy(&GaussianState::thermal(&[0.2])).is_err());
    }

    #[test]
    fn incoherence_examples() {
        assert!(is_incoherent_state(&GaussianState::vacuum(1), 1e-9));
        assert!(is_incoherent_state(&GaussianState::thermal(&[0.5, 1.7]), 1e-9));
        let squeezed = GaussianState::centered(SymMatrix::from_diagonal(&[2.0, 0.125])).unwrap();
        assert!(!is_incoherent_state(&squeezed, 1e-9));
        let displaced = GaussianState::new(SymMatrix::identity(2), vec![0.1, 0.0]).unwrap();
        assert!(!is_incoherent_state(&displaced, 1e-9));
        assert!(!is_incoherent_state(&GaussianState::tmsv(0.3), 1e-9));
    }

    #[test]
    fn tensor_and_marginal() {
        let a = GaussianState::thermal(&[1.0]);
        let b = GaussianState::thermal(&[2.0]);
        let ab = tensor_states(&a, &b);
        assert_eq!(ab.nu(), &SymMatrix::from_diagonal(&[1.0, 1.0, 2.0, 2.0]));
        assert_eq!(tensor_states(&GaussianState::vacuum(1), &GaussianState::vacuum(1)), GaussianState::vacuum(2));
        assert_eq!(marginal(&ab, &[0]).unwrap(), a);
        assert_eq!(marginal(&ab, &[1]).unwrap(), b);
        assert_eq!(marginal(&ab, &[0, 1]).unwrap(), ab);
        assert!(marginal(&ab, &[2]).is_err());
        assert!(marginal(&ab, &[1, 1]).is_err());

        let r = 0.6;
        let m = marginal(&GaussianState::tmsv(r), &[1]).unwrap();
        assert_eq!(m, GaussianState::thermal(&[(2.0 * r).cosh() / 2.0]));
    }

    #[test]
    fn product_detection() {
        let cut = Bipartition::leading(2, 1);
        let ab = tensor_states(&GaussianState::thermal(&[1.0]), &GaussianState::vacuum(1));
        assert!(is_product_state(&ab, &cut, 1e-9).unwrap());
        assert!(!is_product_state(&GaussianState::tmsv(0.5), &cut, 1e-9).unwrap());
        assert!(is_product_state(&GaussianState::tmsv(0.0), &cut, 1e-9).unwrap());
        let expected = (1.0f64).sinh() / 2.0 * 2.0;
        // Four cross entries ±s, two of them nonzero per off-diagonal block.
        assert_abs_diff_eq!(cross_block_norm(GaussianState::tmsv(0.5).nu(), &cut), expected, epsilon = 1e-14);
        assert!(is_product_state(&ab, &Bipartition::leading(3, 1), 1e-9).is_err());
        assert!(Bipartition::new(2, &[2]).is_err());
    }
}
