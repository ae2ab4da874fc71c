//! Holevo χ for Gaussian displacement-modulated ensembles, and the additivity
//! audit for `(CB ⊗ Ψ)^{⊗k}`.
//!
//! The ensemble is a fixed seed state displaced by a Gaussian-distributed vector
//! with covariance `ν_mod`. Its average is `ρ[ν + ν_mod, d]` and every member has
//! the seed's covariance, so χ reduces to `S(Φ(ρ̄)) − S(Φ(ρ_seed))`. General
//! (non-Gaussian) ensembles are not covered.

use serde::Serialize;

use crate::channels::{tensor_channels, tensor_power, GaussianChannel};
use crate::classify::is_coherence_breaking;
use crate::error::{invalid, mismatch, Result};
use crate::matcore::{is_psd, SymMatrix, DEFAULT_TOL};
use crate::phase_space::{entropy_of_cm, marginal, GaussianState};

#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedEnsemble {
    seed: GaussianState,
    nu_mod: SymMatrix,
}

impl ModulatedEnsemble {
    pub fn new(seed: GaussianState, nu_mod: SymMatrix) -> Result<Self> {
        Self::with_tol(seed, nu_mod, DEFAULT_TOL)
    }

    pub fn with_tol(seed: GaussianState, nu_mod: SymMatrix, tol: f64) -> Result<Self> {
        if nu_mod.dim() != seed.nu().dim() {
            return Err(mismatch(format!(
                "modulation covariance is {0}x{0}, seed covariance is {1}x{1}",
                nu_mod.dim(),
                seed.nu().dim()
            )));
        }
        if !seed.is_valid(tol) {
            return Err(invalid("seed state violates the uncertainty relation"));
        }
        if !is_psd(&nu_mod, tol) {
            return Err(invalid("modulation covariance is not positive semidefinite"));
        }
        Ok(Self { seed, nu_mod })
    }

    /// Unmodulated ensemble: the seed alone.
    pub fn trivial(seed: GaussianState) -> Result<Self> {
        let dim = seed.nu().dim();
        Self::new(seed, SymMatrix::zeros(dim))
    }

    pub fn seed(&self) -> &GaussianState {
        &self.seed
    }

    pub fn nu_mod(&self) -> &SymMatrix {
        &self.nu_mod
    }

    pub fn modes(&self) -> usize {
        self.seed.modes()
    }

    /// Reduced ensemble on `modes`: marginal seed and the matching block of `ν_mod`.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self> {
        let seed = marginal(&self.seed, modes)?;
        let modulation = GaussianState::centered(self.nu_mod.clone())?;
        let nu_mod = marginal(&modulation, modes)?.into_parts().0;
        Ok(Self { seed, nu_mod })
    }

    /// `k` independent copies: seed and modulation replicated block-diagonally.
    pub fn replicate(&self, copies: usize) -> Self {
        assert!(copies >= 1);
        let mut seed = self.seed.clone();
        let mut nu_mod = self.nu_mod.clone();
        for _ in 1..copies {
            seed = crate::phase_space::tensor_states(&seed, &self.seed);
            nu_mod = nu_mod.direct_sum(&self.nu_mod);
        }
        Self { seed, nu_mod }
    }
}

/// `ρ[ν_seed + ν_mod, d_seed]`.
pub fn average_state(e: &ModulatedEnsemble) -> GaussianState {
    let nu = e.seed.nu().try_add(&e.nu_mod).expect("dimensions checked on construction");
    GaussianState::new(nu, e.seed.d().to_vec()).expect("dimensions checked on construction")
}

/// `S(Φ(ρ̄)) − S(Φ(ρ_seed))` in nats.
pub fn holevo_chi(c: &GaussianChannel, e: &ModulatedEnsemble) -> Result<f64> {
    holevo_chi_with(c, e, DEFAULT_TOL)
}

/// [`holevo_chi`] with channel validity checked at `tol`.
pub fn holevo_chi_with(c: &GaussianChannel, e: &ModulatedEnsemble, tol: f64) -> Result<f64> {
    if c.modes() != e.modes() {
        return Err(mismatch(format!(
            "channel acts on {} modes, ensemble has {}",
            c.modes(),
            e.modes()
        )));
    }
    if !c.is_valid(tol) {
        return Err(invalid("channel violates complete positivity"));
    }
    let averaged = c.propagate(&average_state(e))?;
    let member = c.propagate(&e.seed)?;
    Ok(entropy_of_cm(averaged.nu())? - entropy_of_cm(member.nu())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditivityReport {
    /// χ of `(cb ⊗ psi)^{⊗k}` on the `k`-fold ensemble.
    pub chi_joint: f64,
    /// `k · (χ(cb, e_A) + χ(psi, e_E))` on the marginal ensembles.
    pub chi_sum: f64,
    pub difference: f64,
    pub k: usize,
}

/// Compares the joint χ of `k` copies of `cb ⊗ psi` against `k` times the sum of
/// the single-system values. `e_joint` lives on the `cb` modes followed by the
/// `psi` modes.
pub fn additivity_audit(cb: &GaussianChannel, psi: &GaussianChannel, e_joint: &ModulatedEnsemble, k: usize) -> Result<AdditivityReport> {
    additivity_audit_with(cb, psi, e_joint, k, DEFAULT_TOL)
}

/// [`additivity_audit`] with class and validity checks at `tol`.
pub fn additivity_audit_with(
    cb: &GaussianChannel,
    psi: &GaussianChannel,
    e_joint: &ModulatedEnsemble,
    k: usize,
    tol: f64,
) -> Result<AdditivityReport> {
    if !is_coherence_breaking(cb, tol) {
        return Err(invalid("first channel is not coherence breaking"));
    }
    if k < 1 {
        return Err(invalid("number of copies must be at least 1"));
    }
    let (n_a, n_e) = (cb.modes(), psi.modes());
    if e_joint.modes() != n_a + n_e {
        return Err(mismatch(format!(
            "ensemble has {} modes, channels act on {n_a} + {n_e}",
            e_joint.modes()
        )));
    }
    let joint = tensor_power(&tensor_channels(cb, psi), k);
    let chi_joint = holevo_chi_with(&joint, &e_joint.replicate(k), tol)?;

    let e_a = e_joint.marginal(&(0..n_a).collect::<Vec<_>>())?;
    let e_e = e_joint.marginal(&(n_a..n_a + n_e).collect::<Vec<_>>())?;
    let chi_sum = k as f64 * (holevo_chi_with(cb, &e_a, tol)? + holevo_chi_with(psi, &e_e, tol)?);
    Ok(AdditivityReport {
        chi_joint,
        chi_sum,
        difference: (chi_joint - chi_sum).abs(),
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{is_incoherent_state, thermal_entropy};
    use approx::assert_abs_diff_eq;

    #[test]
    fn average_examples() {
        let seed = GaussianState::tmsv(0.3);
        let e = ModulatedEnsemble::trivial(seed.clone()).unwrap();
        assert_eq!(average_state(&e), seed);

        let e = ModulatedEnsemble::new(GaussianState::vacuum(1), SymMatrix::scaled_identity(2, 2.0)).unwrap();
        let avg = average_state(&e);
        assert_eq!(avg, GaussianState::thermal(&[2.5]));
        assert!(is_incoherent_state(&avg, 1e-9));

        let e = ModulatedEnsemble::new(GaussianState::vacuum(2), SymMatrix::from_diagonal(&[1.0, 1.0, 3.0, 3.0])).unwrap();
        assert_eq!(average_state(&e), GaussianState::thermal(&[1.5, 3.5]));
    }

    #[test]
    fn ensemble_errors() {
        assert!(ModulatedEnsemble::new(GaussianState::vacuum(1), SymMatrix::from_diagonal(&[1.0, -1.0])).is_err());
        assert!(ModulatedEnsemble::new(GaussianState::vacuum(1), SymMatrix::zeros(4)).is_err());
        assert!(ModulatedEnsemble::new(GaussianState::thermal(&[0.1]), SymMatrix::zeros(2)).is_err());
    }

    #[test]
    fn chi_examples() {
        let e = ModulatedEnsemble::new(GaussianState::vacuum(1), SymMatrix::scaled_identity(2, 0.5)).unwrap();
        let chi = holevo_chi(&GaussianChannel::identity(1), &e).unwrap();
        assert_abs_diff_eq!(chi, thermal_entropy(1.0), epsilon = 1e-14);
        assert_abs_diff_eq!(chi, 0.954771, epsilon = 1e-6);

        assert_eq!(holevo_chi(&GaussianChannel::coherence_breaking(&[0.9]), &e).unwrap(), 0.0);
        let still = ModulatedEnsemble::trivial(GaussianState::thermal(&[1.7])).unwrap();
        assert_eq!(holevo_chi(&GaussianChannel::attenuator(0.4), &still).unwrap(), 0.0);

        assert!(holevo_chi(&GaussianChannel::identity(2), &e).is_err());
    }

    #[test]
    fn additivity_on_tmsv() {
        let seed = GaussianState::tmsv(0.6);
        let nu_mod = SymMatrix::zeros(2).direct_sum(&SymMatrix::scaled_identity(2, 0.5));
        let e = ModulatedEnsemble::new(seed, nu_mod).unwrap();
        let cb = GaussianChannel::coherence_breaking(&[1.0]);
        let psi = GaussianChannel::identity(1);
        let one = additivity_audit(&cb, &psi, &e, 1).unwrap();
        // E output is thermal: c = cosh(1.2)/2 before modulation, c + ½ after.
        let c = (1.2f64).cosh() / 2.0;
        let expect = thermal_entropy(c + 0.5) - thermal_entropy(c);
        assert_abs_diff_eq!(one.chi_joint, expect, epsilon = 1e-12);
        assert!(one.difference <= 1e-9);

        let three = additivity_audit(&cb, &psi, &e, 3).unwrap();
        assert_abs_diff_eq!(three.chi_joint, 3.0 * one.chi_joint, epsilon = 1e-11);
        assert!(three.difference <= 1e-9);
        assert_eq!(three.k, 3);

        let flat = ModulatedEnsemble::trivial(GaussianState::tmsv(0.6)).unwrap();
        let zero = additivity_audit(&cb, &psi, &flat, 2).unwrap();
        assert_abs_diff_eq!(zero.chi_joint, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zero.chi_sum, 0.0, epsilon = 1e-12);

        assert!(additivity_audit(&psi, &cb, &e, 1).is_err());
        assert!(additivity_audit(&cb, &psi, &e, 0).is_err());
    }
}
