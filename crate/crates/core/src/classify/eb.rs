//! Semidecision for entanglement breaking: find `M = M₁ + M₂` with
//! `M₁ ± (i/2)Δ ⪰ 0` and `M₂ ± (i/2)KΔKᵀ ⪰ 0`.
//!
//! Feasibility is always backed by a verified witness. Infeasibility is only
//! reported when a certificate applies: zero noise with `KΔKᵀ ≠ 0`, or failure of
//! the PPT condition (which every EB channel satisfies). Anything else that the
//! search cannot settle within its iteration budget is `Unknown`.

use serde::Serialize;

use crate::channels::GaussianChannel;
use crate::matcore::{hermitian_psd, sym_eigen, sym_sqrt, RealMatrix, SymMatrix};
use crate::phase_space::delta;

pub const DEFAULT_MAX_ITER: usize = 5000;
const CONVERGED: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EbStatus {
    Feasible,
    Infeasible,
    Unknown,
}

impl EbStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EbStatus::Feasible => "feasible",
            EbStatus::Infeasible => "infeasible",
            EbStatus::Unknown => "unknown",
        }
    }

    /// `Some(true)` / `Some(false)` when resolved.
    pub fn resolved(self) -> Option<bool> {
        match self {
            EbStatus::Feasible => Some(true),
            EbStatus::Infeasible => Some(false),
            EbStatus::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `M = 0` forces `M₁ = −M₂`, both PSD, hence both zero.
    ZeroNoise,
    /// The PPT condition fails.
    NotPpt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbWitness {
    pub m1: SymMatrix,
    pub m2: SymMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbOutcome {
    pub status: EbStatus,
    pub witness: Option<EbWitness>,
    pub certificate: Option<Certificate>,
    /// Alternating-projection iterations spent (0 when a closed-form candidate or
    /// a certificate settled the question).
    pub iterations: usize,
    /// Last distance between the projected point and the affine constraint set.
    pub residual: f64,
}

struct Problem {
    m: SymMatrix,
    half_delta: RealMatrix,
    half_kdk: RealMatrix,
    tol: f64,
}

impl Problem {
    fn verify(&self, m1: SymMatrix) -> Option<EbWitness> {
        let m2 = self.m.try_sub(&m1).ok()?;
        let ok = hermitian_psd(&m1, &self.half_delta, self.tol).ok()?
            && hermitian_psd(&m2, &self.half_kdk, self.tol).ok()?;
        ok.then_some(EbWitness { m1, m2 })
    }
}

/// Hermitian matrix stored as real and imaginary parts.
#[derive(Clone)]
struct Herm {
    re: RealMatrix,
    im: RealMatrix,
}

impl Herm {
    /// Projection onto `{H ⪰ floor·I}` through the doubled embedding. Clamping
    /// preserves the complex structure, so both diagonal blocks of the result
    /// agree up to rounding.
    fn clamp(&self, floor: f64) -> Herm {
        let n = self.re.rows();
        let mut d = RealMatrix::zeros(2 * n, 2 * n);
        d.set_block(0, 0, &self.re);
        d.set_block(n, n, &self.re);
        d.set_block(n, 0, &self.im);
        d.set_block(0, n, &-&self.im);
        let d = SymMatrix::new(d).expect("square");
        let Ok(eig) = sym_eigen(&d) else {
            return self.clone();
        };
        let p = eig.rebuild(|w| w.max(floor)).into_matrix();
        let re = (&p.block(0, 0, n, n) + &p.block(n, n, n, n)).scale(0.5);
        let im = (&p.block(n, 0, n, n) - &p.block(0, n, n, n)).scale(0.5);
        Herm { re, im }
    }
}

/// Decides (semi-)membership in the EB class within `max_iter` projection rounds.
pub fn is_eb(c: &GaussianChannel, tol: f64, max_iter: usize) -> EbOutcome {
    let n = c.modes();
    let kdk = c.kdk();
    let problem = Problem {
        m: c.m().clone(),
        half_delta: delta(n).scale(0.5),
        half_kdk: kdk.scale(0.5),
        tol,
    };
    let settled = |status, witness, certificate| EbOutcome {
        status,
        witness,
        certificate,
        iterations: 0,
        residual: 0.0,
    };

    // Closed-form candidates: (M, 0), (½I, M − ½I), (M − ½|KΔKᵀ|, ½|KΔKᵀ|).
    // |KΔKᵀ| = sqrt((KΔKᵀ)ᵀ KΔKᵀ) is the smallest symmetric M₂ dominating ±iKΔKᵀ/2.
    let dim = 2 * n;
    let mut candidates = vec![problem.m.clone(), SymMatrix::scaled_identity(dim, 0.5)];
    if let Ok(abs) = SymMatrix::new(&kdk.transpose() * &kdk).and_then(|g| sym_sqrt(&g)) {
        if let Ok(m1) = problem.m.try_sub(&abs.scale(0.5)) {
            candidates.push(m1);
        }
    }
    for m1 in candidates {
        if let Some(w) = problem.verify(m1) {
            return settled(EbStatus::Feasible, Some(w), None);
        }
    }

    let kdk_scale = 1.0 + c.k().frobenius_norm().powi(2);
    if problem.m.max_abs() <= tol && kdk.frobenius_norm() > tol * kdk_scale {
        return settled(EbStatus::Infeasible, None, Some(Certificate::ZeroNoise));
    }
    if !super::is_ppt(c, tol) {
        return settled(EbStatus::Infeasible, None, Some(Certificate::NotPpt));
    }

    alternating_projections(&problem, max_iter)
}

/// Von Neumann alternating projections between the affine set
/// `{Im H₁ = Δ/2, Im H₂ = KΔKᵀ/2, Re H₁ + Re H₂ = M}` and the cone pair
/// `H₁ ⪰ 0, H₂ ⪰ 0`.
fn alternating_projections(p: &Problem, max_iter: usize) -> EbOutcome {
    let floor = p.tol * (1.0 + p.m.frobenius_norm());
    let half_m = p.m.as_matrix().scale(0.5);
    let mut h1 = Herm {
        re: half_m.clone(),
        im: p.half_delta.clone(),
    };
    let mut h2 = Herm {
        re: half_m,
        im: p.half_kdk.clone(),
    };
    let mut residual = f64::INFINITY;

    for iter in 1..=max_iter {
        // Affine projection.
        let excess = (&(&h1.re + &h2.re) - p.m.as_matrix()).scale(0.5);
        h1 = Herm {
            re: &h1.re - &excess,
            im: p.half_delta.clone(),
        };
        h2 = Herm {
            re: &h2.re - &excess,
            im: p.half_kdk.clone(),
        };
        // Cone projection.
        h1 = h1.clamp(floor);
        h2 = h2.clamp(floor);

        let sum_gap = &(&h1.re + &h2.re) - p.m.as_matrix();
        residual = (sum_gap.frobenius_norm().powi(2)
            + (&h1.im - &p.half_delta).frobenius_norm().powi(2)
            + (&h2.im - &p.half_kdk).frobenius_norm().powi(2))
        .sqrt();

        if residual < CONVERGED {
            let first = SymMatrix::new(h1.re.clone()).ok().and_then(|m1| p.verify(m1));
            let witness = first.or_else(|| {
                let m2 = SymMatrix::new(h2.re.clone()).ok()?;
                p.verify(p.m.try_sub(&m2).ok()?)
            });
            if let Some(w) = witness {
                return EbOutcome {
                    status: EbStatus::Feasible,
                    witness: Some(w),
                    certificate: None,
                    iterations: iter,
                    residual,
                };
            }
        }
    }
    EbOutcome {
        status: EbStatus::Unknown,
        witness: None,
        certificate: None,
        iterations: max_iter,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::validate_channel;
    use crate::classify::is_cq;

    fn check_witness(c: &GaussianChannel, w: &EbWitness, tol: f64) {
        let n = c.modes();
        assert!(hermitian_psd(&w.m1, &delta(n).scale(0.5), tol).unwrap());
        assert!(hermitian_psd(&w.m2, &c.kdk().scale(0.5), tol).unwrap());
        assert!((&(w.m1.as_matrix() + w.m2.as_matrix()) - c.m().as_matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn cq_channels_use_trivial_split() {
        let k = RealMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let c = GaussianChannel::centered(k, SymMatrix::scaled_identity(2, 0.5)).unwrap();
        assert!(is_cq(&c, 1e-9));
        let out = is_eb(&c, 1e-9, 100);
        assert_eq!(out.status, EbStatus::Feasible);
        let w = out.witness.unwrap();
        assert_eq!(&w.m1, c.m());
        assert_eq!(w.m2.max_abs(), 0.0);
    }

    #[test]
    fn identity_is_certified_infeasible() {
        let out = is_eb(&GaussianChannel::identity(2), 1e-9, 100);
        assert_eq!(out.status, EbStatus::Infeasible);
        assert_eq!(out.certificate, Some(Certificate::ZeroNoise));
    }

    #[test]
    fn pure_loss_is_not_feasible() {
        let out = is_eb(&GaussianChannel::attenuator(0.5), 1e-9, 200);
        assert_ne!(out.status, EbStatus::Feasible);
    }

    #[test]
    fn noisy_attenuator_at_threshold() {
        // λ = ½(1 + η) is exactly the phase-insensitive EB threshold.
        let eta: f64 = 0.4;
        let k = RealMatrix::identity(2).scale(eta.sqrt());
        let c = GaussianChannel::centered(k, SymMatrix::scaled_identity(2, 0.5 * (1.0 + eta))).unwrap();
        let out = is_eb(&c, 1e-9, 100);
        assert_eq!(out.status, EbStatus::Feasible);
        check_witness(&c, &out.witness.unwrap(), 1e-9);
    }

    #[test]
    fn projections_find_non_obvious_witness() {
        // K = I with squeezed noise: the only splits are near (M/2, M/2), which no
        // closed-form candidate hits.
        let r: f64 = 0.5;
        let m = SymMatrix::from_diagonal(&[(2.0 * r).exp() + 0.05, (-2.0 * r).exp() + 0.05]);
        let c = GaussianChannel::centered(RealMatrix::identity(2), m).unwrap();
        assert!(validate_channel(&c));
        let out = is_eb(&c, 1e-9, DEFAULT_MAX_ITER);
        assert_eq!(out.status, EbStatus::Feasible, "{out:?}");
        assert!(out.iterations > 0);
        check_witness(&c, &out.witness.unwrap(), 1e-9);
    }

    #[test]
    fn deterministic() {
        let r: f64 = 0.3;
        let m = SymMatrix::from_diagonal(&[(2.0 * r).exp() + 0.1, (-2.0 * r).exp() + 0.1]);
        let c = GaussianChannel::centered(RealMatrix::identity(2), m).unwrap();
        assert_eq!(is_eb(&c, 1e-9, 500), is_eb(&c, 1e-9, 500));
    }
}
