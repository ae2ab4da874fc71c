//! Structural classifiers for Gaussian channels.
//!
//! Predicates are evaluated independently; [`classify`] cross-checks them against
//! the inclusion chain CB ⊆ CQ ⊆ EB ⊆ PPT instead of deriving one from another.

mod eb;
mod incoherent;

use std::collections::BTreeMap;

use serde::Serialize;

pub use eb::{is_eb, Certificate, EbOutcome, EbStatus, EbWitness, DEFAULT_MAX_ITER};
pub use incoherent::{decompose_incoherent, noise_bound, synthesize_incoherent, IncoherentDecomposition};

use crate::channels::{tensor_channels, validate_channel, GaussianChannel};
use crate::error::{invalid, mismatch, Error, Result};
use crate::matcore::{hermitian_min_eigenvalue, hermitian_psd, RealMatrix, DEFAULT_TOL};
use crate::phase_space::{cross_block_norm, delta, is_product_state, validate_state, Bipartition, GaussianState};

/// Coherence breaking: `K = 0`, `d̄ = 0`, `M = ⊕ λᵢ I₂` with every `λᵢ ≥ ½`.
pub fn is_coherence_breaking(c: &GaussianChannel, tol: f64) -> bool {
    if c.k().max_abs() > tol || c.dbar().iter().any(|x| x.abs() > tol) {
        return false;
    }
    let m = c.m();
    let pattern_tol = tol * (1.0 + m.max_abs());
    (0..m.dim()).all(|i| {
        (0..m.dim()).all(|j| {
            let x = m.get(i, j);
            if i != j {
                x.abs() <= pattern_tol
            } else if i % 2 == 1 {
                (x - m.get(i - 1, i - 1)).abs() <= pattern_tol && x >= 0.5 - tol
            } else {
                x >= 0.5 - tol
            }
        })
    })
}

/// Classical-quantum: `KΔKᵀ = 0`, tested as `‖KΔKᵀ‖_F ≤ tol · (1 + ‖K‖_F²)`.
pub fn is_cq(c: &GaussianChannel, tol: f64) -> bool {
    c.kdk().frobenius_norm() <= tol * (1.0 + c.k().frobenius_norm().powi(2))
}

fn ppt_forms(c: &GaussianChannel) -> (RealMatrix, RealMatrix) {
    let d = delta(c.modes());
    let kdk = c.kdk();
    ((&d + &kdk).scale(0.5), (&d - &kdk).scale(0.5))
}

/// `M ⪰ (i/2)(Δ ± KΔKᵀ)`, both signs.
pub fn is_ppt(c: &GaussianChannel, tol: f64) -> bool {
    let (plus, minus) = ppt_forms(c);
    let m = c.m();
    hermitian_psd(m, &plus, tol).unwrap_or(false) && hermitian_psd(m, &minus, tol).unwrap_or(false)
}

/// Block-monomial form `K = (P_π ⊗ I₂)(⊕ Kᵢ)`, `M` block diagonal: such channels map
/// product states to product states. Returns the routing `π` when it applies.
pub fn is_product_preserving(c: &GaussianChannel, tol: f64) -> Option<Vec<usize>> {
    let m = c.m();
    let threshold = tol * (1.0 + m.frobenius_norm());
    let block_diagonal = (0..m.dim()).all(|i| (0..m.dim()).all(|j| i / 2 == j / 2 || m.get(i, j).abs() <= threshold));
    if !block_diagonal {
        return None;
    }
    incoherent::block_routing(c.k(), tol).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub is_incoherent: bool,
    pub decomposition: Option<IncoherentDecomposition>,
    pub is_product_preserving: bool,
    pub is_cb: bool,
    pub is_cq: bool,
    pub is_eb: EbStatus,
    pub is_ppt: bool,
    pub eb_witness: Option<EbWitness>,
    pub eb_certificate: Option<Certificate>,
    /// Implications of the chain CB ⇒ CQ ⇒ EB ⇒ PPT contradicted by the
    /// predicates; empty for every channel the theory covers.
    pub chain_violations: Vec<String>,
    pub residuals: BTreeMap<String, f64>,
}

impl ClassReport {
    pub fn chain_holds(&self) -> bool {
        self.chain_violations.is_empty()
    }
}

/// Pairs `(stronger, weaker)` where the stronger class holds and the weaker is
/// definitely refuted.
fn chain_violations(cb: bool, cq: bool, eb: EbStatus, ppt: bool) -> Vec<String> {
    let levels = [("CB", Some(cb)), ("CQ", Some(cq)), ("EB", eb.resolved()), ("PPT", Some(ppt))];
    let mut out = Vec::new();
    for (i, (strong, s)) in levels.iter().enumerate() {
        for (weak, w) in &levels[i + 1..] {
            if *s == Some(true) && *w == Some(false) {
                out.push(format!("{strong} => {weak}"));
            }
        }
    }
    out
}

pub fn classify(c: &GaussianChannel) -> Result<ClassReport> {
    classify_with(c, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn classify_with(c: &GaussianChannel, tol: f64, max_iter: usize) -> Result<ClassReport> {
    if !validate_channel(c) {
        return Err(invalid("channel violates complete positivity"));
    }
    let decomposition = match decompose_incoherent(c, tol) {
        Ok(d) => Some(d),
        Err(Error::NotIncoherent(_)) => None,
        Err(e) => return Err(e),
    };
    let is_cb = is_coherence_breaking(c, tol);
    let is_cq = is_cq(c, tol);
    let is_ppt = is_ppt(c, tol);
    let eb = is_eb(c, tol, max_iter);

    let (plus, minus) = ppt_forms(c);
    let mut residuals = BTreeMap::new();
    residuals.insert("kdk_frobenius".to_owned(), c.kdk().frobenius_norm());
    residuals.insert("cp_min_eigenvalue".to_owned(), c.cp_min_eigenvalue());
    residuals.insert("ppt_plus_min_eigenvalue".to_owned(), hermitian_min_eigenvalue(c.m(), &plus)?);
    residuals.insert("ppt_minus_min_eigenvalue".to_owned(), hermitian_min_eigenvalue(c.m(), &minus)?);
    residuals.insert("eb_iterations".to_owned(), eb.iterations as f64);
    residuals.insert("eb_residual".to_owned(), eb.residual);

    Ok(ClassReport {
        is_incoherent: decomposition.is_some(),
        is_product_preserving: is_product_preserving(c, tol).is_some(),
        decomposition,
        is_cb,
        is_cq,
        is_eb: eb.status,
        is_ppt,
        eb_witness: eb.witness,
        eb_certificate: eb.certificate,
        chain_violations: chain_violations(is_cb, is_cq, eb.status, is_ppt),
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCheck {
    pub is_product: bool,
    pub cross_norm: f64,
    pub output: GaussianState,
}

/// Applies `cb ⊗ psi` to a joint state and measures the correlations left
/// between the `cb` modes and the `psi` modes.
pub fn verify_product_output(cb: &GaussianChannel, psi: &GaussianChannel, s: &GaussianState, tol: f64) -> Result<ProductCheck> {
    if !is_coherence_breaking(cb, tol) {
        return Err(invalid("first channel is not coherence breaking"));
    }
    if !validate_channel(cb) || !validate_channel(psi) {
        return Err(invalid("channel violates complete positivity"));
    }
    let n_a = cb.modes();
    if s.modes() != n_a + psi.modes() {
        return Err(mismatch(format!(
            "joint state has {} modes, channels act on {} + {}",
            s.modes(),
            n_a,
            psi.modes()
        )));
    }
    if !validate_state(s) {
        return Err(invalid("state violates the uncertainty relation"));
    }
    let output = tensor_channels(cb, psi).propagate(s)?;
    let cut = Bipartition::leading(s.modes(), n_a);
    Ok(ProductCheck {
        is_product: is_product_state(&output, &cut, tol)?,
        cross_norm: cross_block_norm(output.nu(), &cut),
        output,
    })
}
