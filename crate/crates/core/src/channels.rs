//! Gaussian channels `Φ(K, M, d̄)` acting as `ν ↦ KνKᵀ + M`, `d ↦ Kd + d̄`.
//!
//! Complete positivity is `M ± (i/2)(Δ − KΔKᵀ) ⪰ 0`. Only the `+` branch is
//! evaluated: for real `M` and real skew `B`, `M + iB` and `M − iB` are complex
//! conjugates and share a spectrum.

use crate::error::{invalid, mismatch, Result};
use crate::matcore::{hermitian_min_eigenvalue, hermitian_psd, RealMatrix, SymMatrix, DEFAULT_TOL};
use crate::phase_space::{delta, GaussianState};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    n: usize,
    k: RealMatrix,
    m: SymMatrix,
    dbar: Vec<f64>,
}

impl GaussianChannel {
    pub fn new(k: RealMatrix, m: SymMatrix, dbar: Vec<f64>) -> Result<Self> {
        let dim = m.dim();
        if !dim.is_multiple_of(2) {
            return Err(mismatch(format!("noise matrix dimension {dim} is odd")));
        }
        if k.rows() != dim || k.cols() != dim {
            return Err(mismatch(format!(
                "gain matrix is {}x{}, noise matrix is {dim}x{dim}",
                k.rows(),
                k.cols()
            )));
        }
        if dbar.len() != dim {
            return Err(mismatch(format!(
                "displacement has length {}, expected {dim}",
                dbar.len()
            )));
        }
        Ok(Self { n: dim / 2, k, m, dbar })
    }

    /// Channel with zero displacement.
    pub fn centered(k: RealMatrix, m: SymMatrix) -> Result<Self> {
        let dim = m.dim();
        Self::new(k, m, vec![0.0; dim])
    }

    pub fn identity(n: usize) -> Self {
        Self::centered(RealMatrix::identity(2 * n), SymMatrix::zeros(2 * n)).expect("consistent shapes")
    }

    /// One-mode pure-loss channel of transmissivity `eta`.
    pub fn attenuator(eta: f64) -> Self {
        let k = RealMatrix::identity(2).scale(eta.sqrt());
        let m = SymMatrix::scaled_identity(2, 0.5 * (1.0 - eta));
        Self::centered(k, m).expect("consistent shapes")
    }

    /// `K = 0`, `d̄ = 0`, `M = ⊕ λᵢ I₂`: replaces every input by a product of
    /// thermal states.
    pub fn coherence_breaking(lambdas: &[f64]) -> Self {
        assert!(!lambdas.is_empty(), "need at least one mode");
        let dim = 2 * lambdas.len();
        let diag: Vec<f64> = lambdas.iter().flat_map(|&l| [l, l]).collect();
        Self::centered(RealMatrix::zeros(dim, dim), SymMatrix::from_diagonal(&diag)).expect("consistent shapes")
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &RealMatrix {
        &self.k
    }

    pub fn m(&self) -> &SymMatrix {
        &self.m
    }

    pub fn dbar(&self) -> &[f64] {
        &self.dbar
    }

    /// `KΔKᵀ`.
    pub fn kdk(&self) -> RealMatrix {
        self.k.congruence(&delta(self.n)).expect("square")
    }

    /// `½(Δ − KΔKᵀ)`, the imaginary part of the CP form.
    fn cp_imaginary(&self) -> RealMatrix {
        (&delta(self.n) - &self.kdk()).scale(0.5)
    }

    /// Smallest eigenvalue of `M + (i/2)(Δ − KΔKᵀ)`.
    pub fn cp_min_eigenvalue(&self) -> f64 {
        hermitian_min_eigenvalue(&self.m, &self.cp_imaginary()).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        hermitian_psd(&self.m, &self.cp_imaginary(), tol).unwrap_or(false)
    }

    /// Output without validity checks.
    pub(crate) fn propagate(&self, s: &GaussianState) -> Result<GaussianState> {
        if s.modes() != self.n {
            return Err(mismatch(format!(
                "channel acts on {} modes, state has {}",
                self.n,
                s.modes()
            )));
        }
        let nu = s.nu().congruence(&self.k)?.try_add(&self.m)?;
        let d = self
            .k
            .mul_vec(s.d())?
            .into_iter()
            .zip(&self.dbar)
            .map(|(a, b)| a + b)
            .collect();
        GaussianState::new(nu, d)
    }
}

/// Complete positivity at the default tolerance.
pub fn validate_channel(c: &GaussianChannel) -> bool {
    c.is_valid(DEFAULT_TOL)
}

/// `ρ[ν, d] ↦ ρ[KνKᵀ + M, Kd + d̄]`; both arguments must be valid.
pub fn apply(c: &GaussianChannel, s: &GaussianState) -> Result<GaussianState> {
    apply_with(c, s, DEFAULT_TOL)
}

/// [`apply`] with validity checked at `tol`.
pub fn apply_with(c: &GaussianChannel, s: &GaussianState, tol: f64) -> Result<GaussianState> {
    if c.modes() != s.modes() {
        return Err(mismatch(format!(
            "channel acts on {} modes, state has {}",
            c.modes(),
            s.modes()
        )));
    }
    if !c.is_valid(tol) {
        return Err(invalid("channel violates complete positivity"));
    }
    if !s.is_valid(tol) {
        return Err(invalid("state violates the uncertainty relation"));
    }
    c.propagate(s)
}

/// `c2 ∘ c1`: `K = K₂K₁`, `M = K₂M₁K₂ᵀ + M₂`, `d̄ = K₂d̄₁ + d̄₂`.
pub fn compose(c2: &GaussianChannel, c1: &GaussianChannel) -> Result<GaussianChannel> {
    if c1.n != c2.n {
        return Err(mismatch(format!(
            "cannot compose a {}-mode channel after a {}-mode channel",
            c2.n, c1.n
        )));
    }
    let k = c2.k.matmul(&c1.k)?;
    let m = c1.m.congruence(&c2.k)?.try_add(&c2.m)?;
    let dbar = c2
        .k
        .mul_vec(&c1.dbar)?
        .into_iter()
        .zip(&c2.dbar)
        .map(|(a, b)| a + b)
        .collect();
    GaussianChannel::new(k, m, dbar)
}

/// `a ⊗ b`, with `a` acting on the leading modes.
pub fn tensor_channels(a: &GaussianChannel, b: &GaussianChannel) -> GaussianChannel {
    let k = a.k.direct_sum(&b.k);
    let m = a.m.direct_sum(&b.m);
    let dbar = a.dbar.iter().chain(&b.dbar).copied().collect();
    GaussianChannel::new(k, m, dbar).expect("direct sum of consistent channels")
}

/// `c^{⊗copies}`.
pub fn tensor_power(c: &GaussianChannel, copies: usize) -> GaussianChannel {
    assert!(copies >= 1);
    (1..copies).fold(c.clone(), |acc, _| tensor_channels(&acc, c))
}
