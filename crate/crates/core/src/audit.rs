//! Seeded batch audits. Trial `i` draws from stream `i` of the configured seed,
//! so reports are identical under sequential and parallel execution.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::capacity::{additivity_audit, holevo_chi, ModulatedEnsemble};
use crate::channels::GaussianChannel;
use crate::classify::{classify_with, decompose_incoherent, synthesize_incoherent, EbStatus, IncoherentDecomposition};
use crate::error::{invalid, Result};
use crate::matcore::SymMatrix;
use crate::par::{map_trials, ExecMode};
use crate::sampling::{ChannelKind, Sampler, SamplerConfig, StateKind, GENERATOR};

/// Shared settings of a batch audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Trial `i` uses `1 + i % max_modes` modes.
    pub max_modes: usize,
    pub scale: f64,
    pub max_iter: usize,
    #[serde(skip)]
    pub mode: ExecMode,
}

impl AuditConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            tol: crate::DEFAULT_TOL,
            max_modes: 3,
            scale: 1.0,
            max_iter: crate::classify::DEFAULT_MAX_ITER,
            mode: ExecMode::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.max_modes < 1 {
            return Err(invalid("max_modes must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tolerance must be positive"));
        }
        SamplerConfig::new(self.seed, 1, self.scale).map(|_| ())
    }

    pub fn sampler(&self, trial: usize) -> Sampler {
        let n = 1 + trial % self.max_modes;
        let cfg = SamplerConfig::new(self.seed, n, self.scale).expect("checked").fork(trial as u64);
        Sampler::new(&cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub cb: usize,
    pub cq: usize,
    pub eb_feasible: usize,
    pub eb_infeasible: usize,
    pub eb_unknown: usize,
    pub ppt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub kind: ChannelKind,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub generator: &'static str,
    pub violations: usize,
    pub counts: ClassCounts,
    /// Trial index and the broken implications, for each violating trial.
    pub violation_trials: Vec<(usize, Vec<String>)>,
}

/// Samples `trials` channels of `kind` and checks CB ⇒ CQ ⇒ EB ⇒ PPT on each.
pub fn audit_inclusions(kind: ChannelKind, cfg: &AuditConfig) -> Result<InclusionReport> {
    cfg.check()?;
    let reports = map_trials(cfg.mode, cfg.trials, |i| {
        let c = cfg.sampler(i).channel(kind);
        classify_with(&c, cfg.tol, cfg.max_iter)
    });
    let mut counts = ClassCounts::default();
    let mut violation_trials = Vec::new();
    for (i, r) in reports.into_iter().enumerate() {
        let r = r?;
        counts.cb += r.is_cb as usize;
        counts.cq += r.is_cq as usize;
        counts.ppt += r.is_ppt as usize;
        match r.is_eb {
            EbStatus::Feasible => counts.eb_feasible += 1,
            EbStatus::Infeasible => counts.eb_infeasible += 1,
            EbStatus::Unknown => counts.eb_unknown += 1,
        }
        if !r.chain_holds() {
            violation_trials.push((i, r.chain_violations));
        }
    }
    Ok(InclusionReport {
        kind,
        trials: cfg.trials,
        seed: cfg.seed,
        tol: cfg.tol,
        generator: GENERATOR,
        violations: violation_trials.len(),
        counts,
        violation_trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub generator: &'static str,
    pub failures: usize,
    pub max_lambda_error: f64,
    pub max_gain_error: f64,
    pub failed_trials: Vec<usize>,
}

/// Largest parameter errors between two decompositions, modulo the
/// `(t, O) ↔ (−t, −O)` gauge. `None` when the routings differ.
pub fn decomposition_error(expected: &IncoherentDecomposition, got: &IncoherentDecomposition) -> Option<(f64, f64)> {
    if expected.pi != got.pi {
        return None;
    }
    let mut lambda_err = 0.0f64;
    let mut gain_err = 0.0f64;
    for j in 0..expected.modes() {
        lambda_err = lambda_err.max((expected.lambda[j] - got.lambda[j]).abs());
        // t·O is invariant under the gauge and fixes O up to sign when t ≠ 0.
        let a = expected.o[j].scale(expected.t[j]);
        let b = got.o[j].scale(got.t[j]);
        gain_err = gain_err.max((&a - &b).max_abs());
        if expected.t[j] == 0.0 || got.t[j] == 0.0 {
            gain_err = gain_err.max((&expected.o[j] - &got.o[j]).max_abs());
        }
    }
    Some((lambda_err, gain_err))
}

/// Synthesize then decompose `trials` incoherent channels.
pub fn audit_round_trip(cfg: &AuditConfig) -> Result<RoundTripReport> {
    cfg.check()?;
    let errors = map_trials(cfg.mode, cfg.trials, |i| -> Result<Option<(f64, f64)>> {
        let d = cfg.sampler(i).incoherent_decomposition();
        let c = synthesize_incoherent(&d)?;
        Ok(decompose_incoherent(&c, cfg.tol).ok().and_then(|got| decomposition_error(&d, &got)))
    });
    let mut report = RoundTripReport {
        trials: cfg.trials,
        seed: cfg.seed,
        tol: cfg.tol,
        generator: GENERATOR,
        failures: 0,
        max_lambda_error: 0.0,
        max_gain_error: 0.0,
        failed_trials: Vec::new(),
    };
    for (i, e) in errors.into_iter().enumerate() {
        match e? {
            Some((l, g)) if l <= cfg.tol && g <= cfg.tol => {
                report.max_lambda_error = report.max_lambda_error.max(l);
                report.max_gain_error = report.max_gain_error.max(g);
            }
            other => {
                if let Some((l, g)) = other {
                    report.max_lambda_error = report.max_lambda_error.max(l);
                    report.max_gain_error = report.max_gain_error.max(g);
                }
                report.failures += 1;
                report.failed_trials.push(i);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityBatchReport {
    pub trials: usize,
    pub seed: u64,
    pub ks: Vec<usize>,
    pub generator: &'static str,
    /// Largest `|χ_joint − χ_sum|` over all trials and copy numbers.
    pub max_difference: f64,
    /// Largest `|χ(CB, e_A)|`; CB outputs ignore the input, so this is zero.
    pub max_cb_chi: f64,
    pub per_k_max_difference: BTreeMap<usize, f64>,
}

/// One sampled additivity instance: a CB channel, an arbitrary `Ψ`, and a joint
/// ensemble on the CB modes followed by the `Ψ` modes.
pub struct AdditivityTriple {
    pub cb: GaussianChannel,
    pub psi: GaussianChannel,
    pub ensemble: ModulatedEnsemble,
}

pub fn sample_additivity_triple(cfg: &AuditConfig, trial: usize) -> AdditivityTriple {
    let n_a = 1 + trial % 2;
    let n_e = 1 + (trial / 2) % 2;
    let base = SamplerConfig::new(cfg.seed, n_a, cfg.scale).expect("checked").fork(trial as u64);
    let mut rng = Sampler::new(&base);
    let cb = rng.channel(ChannelKind::Cb);
    let psi_kind = ChannelKind::ALL[trial % ChannelKind::ALL.len()];
    let mut psi_rng = Sampler::new(&base.with_modes(n_e).fork(trial as u64 + (1 << 32)));
    let psi = psi_rng.channel(psi_kind);
    let mut joint_rng = Sampler::new(&base.with_modes(n_a + n_e).fork(trial as u64 + (2 << 32)));
    let seed = if n_a + n_e == 2 && trial.is_multiple_of(3) {
        let r = joint_rng.uniform(0.0, 2.0);
        joint_rng.state(StateKind::Tmsv(r)).expect("two modes")
    } else {
        crate::GaussianState::centered(joint_rng.valid_cm(n_a + n_e)).expect("even dimension")
    };
    let nu_mod: SymMatrix = joint_rng.psd(2 * (n_a + n_e));
    AdditivityTriple {
        cb,
        psi,
        ensemble: ModulatedEnsemble::new(seed, nu_mod).expect("sampled valid"),
    }
}

pub fn audit_additivity_batch(cfg: &AuditConfig, ks: &[usize]) -> Result<AdditivityBatchReport> {
    cfg.check()?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(invalid("copy numbers must be positive"));
    }
    let rows = map_trials(cfg.mode, cfg.trials, |i| -> Result<(Vec<f64>, f64)> {
        let t = sample_additivity_triple(cfg, i);
        let diffs = ks
            .iter()
            .map(|&k| additivity_audit(&t.cb, &t.psi, &t.ensemble, k).map(|r| r.difference))
            .collect::<Result<Vec<_>>>()?;
        let n_a = t.cb.modes();
        let e_a = t.ensemble.marginal(&(0..n_a).collect::<Vec<_>>())?;
        Ok((diffs, holevo_chi(&t.cb, &e_a)?.abs()))
    });
    let mut per_k: BTreeMap<usize, f64> = ks.iter().map(|&k| (k, 0.0)).collect();
    let mut max_cb_chi = 0.0f64;
    for row in rows {
        let (diffs, cb_chi) = row?;
        for (&k, d) in ks.iter().zip(diffs) {
            let slot = per_k.get_mut(&k).expect("seeded");
            *slot = slot.max(d);
        }
        max_cb_chi = max_cb_chi.max(cb_chi);
    }
    Ok(AdditivityBatchReport {
        trials: cfg.trials,
        seed: cfg.seed,
        ks: ks.to_vec(),
        generator: GENERATOR,
        max_difference: per_k.values().copied().fold(0.0, f64::max),
        max_cb_chi,
        per_k_max_difference: per_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(trials: usize, mode: ExecMode) -> AuditConfig {
        AuditConfig { mode, ..AuditConfig::new(trials, 11) }
    }

    #[test]
    fn inclusion_reports_agree_across_modes() {
        for kind in ChannelKind::ALL {
            let seq = audit_inclusions(kind, &cfg(30, ExecMode::Sequential)).unwrap();
            let par = audit_inclusions(kind, &cfg(30, ExecMode::Parallel)).unwrap();
            assert_eq!(seq, par);
            assert_eq!(seq.violations, 0, "{kind}: {:?}", seq.violation_trials);
        }
    }

    #[test]
    fn class_counts_follow_kind() {
        let r = audit_inclusions(ChannelKind::Cb, &cfg(20, ExecMode::Parallel)).unwrap();
        assert_eq!(r.counts.cb, 20);
        assert_eq!(r.counts.eb_feasible, 20);
        let r = audit_inclusions(ChannelKind::Cq, &cfg(20, ExecMode::Parallel)).unwrap();
        assert_eq!(r.counts.cq, 20);
        assert_eq!(r.counts.ppt, 20);
    }

    #[test]
    fn round_trip_small_batch() {
        let r = audit_round_trip(&AuditConfig { max_modes: 5, ..cfg(100, ExecMode::Parallel) }).unwrap();
        assert_eq!(r.failures, 0, "{:?}", r.failed_trials);
        assert!(r.max_lambda_error <= 1e-9);
    }

    #[test]
    fn gauge_is_ignored() {
        let mut s = Sampler::new(&SamplerConfig::new(3, 2, 1.0).unwrap());
        let d = s.incoherent_decomposition();
        let mut flipped = d.clone();
        for j in 0..2 {
            flipped.t[j] = -flipped.t[j];
            flipped.o[j] = flipped.o[j].scale(-1.0);
        }
        let (l, g) = decomposition_error(&d, &flipped).unwrap();
        assert_eq!(l, 0.0);
        assert!(g < 1e-15);
        let mut other = d.clone();
        other.pi.reverse();
        if other.pi != d.pi {
            assert!(decomposition_error(&d, &other).is_none());
        }
    }

    #[test]
    fn additivity_small_batch() {
        let r = audit_additivity_batch(&cfg(12, ExecMode::Parallel), &[1, 2]).unwrap();
        assert!(r.max_difference <= 1e-9, "{r:?}");
        assert!(r.max_cb_chi <= 1e-12);
        assert!(audit_additivity_batch(&cfg(1, ExecMode::Parallel), &[0]).is_err());
    }
}
