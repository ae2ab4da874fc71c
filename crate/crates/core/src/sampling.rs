//! Seeded generators of valid states and channels for property tests and audits.
//!
//! Streams come from ChaCha8: a config names a 64-bit seed and a stream index,
//! and [`SamplerConfig::fork`] derives independent streams from one seed.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channels::GaussianChannel;
use crate::classify::{noise_bound, synthesize_incoherent, IncoherentDecomposition};
use crate::error::{invalid, Result};
use crate::matcore::{RealMatrix, SymMatrix};
use crate::phase_space::symplectic::{beam_splitter, embed_one_mode, reflection, rotation, squeezer};
use crate::phase_space::GaussianState;

/// Recorded in reports so a run can be reproduced.
pub const GENERATOR: &str = "ChaCha8";

const BOUNDARY_PROB: f64 = 0.2;
const ZERO_GAIN_PROB: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub stream: u64,
    pub n: usize,
    pub scale: f64,
}

impl SamplerConfig {
    pub fn new(seed: u64, n: usize, scale: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("mode count must be at least 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale must be positive"));
        }
        Ok(Self { seed, stream: 0, n, scale })
    }

    /// Same seed, stream `stream`.
    pub fn fork(&self, stream: u64) -> Self {
        Self { stream, ..*self }
    }

    pub fn with_modes(&self, n: usize) -> Self {
        assert!(n >= 1);
        Self { n, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Thermal,
    Squeezed,
    Displaced,
    Generic,
    Tmsv(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Generic,
    Incoherent,
    Cb,
    Cq,
    ProductPreserving,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Generic,
        ChannelKind::Incoherent,
        ChannelKind::Cb,
        ChannelKind::Cq,
        ChannelKind::ProductPreserving,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Generic => "generic",
            ChannelKind::Incoherent => "incoherent",
            ChannelKind::Cb => "cb",
            ChannelKind::Cq => "cq",
            ChannelKind::ProductPreserving => "product-preserving",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s || (s == "product_preserving" && *k == ChannelKind::ProductPreserving))
            .ok_or_else(|| invalid(format!("unknown channel kind {s:?}")))
    }
}

pub struct Sampler {
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(cfg: &SamplerConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(cfg.stream);
        Self { cfg: *cfg, rng }
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            lo
        } else {
            self.rng.random_range(lo..hi)
        }
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, self.index(i + 1));
        }
        p
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize, sigma: f64) -> RealMatrix {
        let data = (0..rows * cols).map(|_| sigma * self.normal()).collect();
        RealMatrix::new(rows, cols, data).expect("positive shape")
    }

    /// `G Gᵀ` for a Gaussian `G` with entry spread `scale / √dim`.
    pub fn psd(&mut self, dim: usize) -> SymMatrix {
        let g = self.gaussian_matrix(dim, dim, self.cfg.scale / (dim as f64).sqrt());
        SymMatrix::new(&g * &g.transpose()).expect("square")
    }

    pub fn displacement(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.cfg.scale * self.normal()).collect()
    }

    fn thermal_value(&mut self) -> f64 {
        if self.chance(BOUNDARY_PROB) {
            0.5
        } else {
            0.5 + self.uniform(0.0, self.cfg.scale)
        }
    }

    /// `R(φ) · Sq(r) · R(θ)` with `|r| ≤ scale / 2`.
    pub fn one_mode_symplectic(&mut self) -> RealMatrix {
        let r = self.uniform(-0.5, 0.5) * self.cfg.scale;
        let (phi, theta) = (self.uniform(0.0, TAU), self.uniform(0.0, TAU));
        &(&rotation(phi) * &squeezer(r)) * &rotation(theta)
    }

    /// Layers of local symplectics interleaved with beam splitters on random pairs.
    pub fn symplectic(&mut self, n: usize) -> RealMatrix {
        let mut s = RealMatrix::identity(2 * n);
        for _ in 0..2 {
            for mode in 0..n {
                let local = self.one_mode_symplectic();
                s = &embed_one_mode(n, mode, &local) * &s;
            }
            if n > 1 {
                for _ in 0..n {
                    let i = self.index(n);
                    let j = (i + 1 + self.index(n - 1)) % n;
                    let theta = self.uniform(0.0, PI);
                    s = &beam_splitter(n, i, j, theta) * &s;
                }
            }
        }
        s
    }

    /// Covariance `S (⊕ λᵢ I₂) Sᵀ` of a random multimode squeezed thermal state.
    pub fn valid_cm(&mut self, n: usize) -> SymMatrix {
        let lambdas: Vec<f64> = (0..n).map(|_| self.thermal_value()).collect();
        let thermal = GaussianState::thermal(&lambdas).into_parts().0;
        let s = self.symplectic(n);
        thermal.congruence(&s).expect("square")
    }

    pub fn state(&mut self, kind: StateKind) -> Result<GaussianState> {
        let n = self.cfg.n;
        let dim = 2 * n;
        match kind {
            StateKind::Thermal => {
                let lambdas: Vec<f64> = (0..n).map(|_| self.thermal_value()).collect();
                Ok(GaussianState::thermal(&lambdas))
            }
            StateKind::Squeezed => Ok(self.locally_squeezed(n)),
            StateKind::Displaced => {
                let (nu, _) = self.locally_squeezed(n).into_parts();
                let d = self.displacement(dim);
                GaussianState::new(nu, d)
            }
            StateKind::Generic => {
                let nu = SymMatrix::scaled_identity(dim, 0.5).try_add(&self.psd(dim))?;
                let d = self.displacement(dim);
                GaussianState::new(nu, d)
            }
            StateKind::Tmsv(r) => {
                if n != 2 {
                    return Err(invalid("two-mode squeezed vacuum needs n = 2"));
                }
                Ok(GaussianState::tmsv(r))
            }
        }
    }

    fn locally_squeezed(&mut self, n: usize) -> GaussianState {
        let mut nu = SymMatrix::zeros(2);
        for mode in 0..n {
            let lambda = self.thermal_value();
            let local = SymMatrix::scaled_identity(2, lambda)
                .congruence(&self.one_mode_symplectic())
                .expect("2x2");
            nu = if mode == 0 { local } else { nu.direct_sum(&local) };
        }
        GaussianState::centered(nu).expect("even dimension")
    }

    /// Random incoherent parameterization; noise sits exactly on the CP bound
    /// with probability 0.2, and at most one mode gets zero gain.
    pub fn incoherent_decomposition(&mut self) -> IncoherentDecomposition {
        let n = self.cfg.n;
        let pi = self.permutation(n);
        let zero_mode = self.chance(ZERO_GAIN_PROB).then(|| self.index(n));
        let mut t = Vec::with_capacity(n);
        let mut o = Vec::with_capacity(n);
        let mut lambda = Vec::with_capacity(n);
        for mode in 0..n {
            let (ti, oi) = if zero_mode == Some(mode) {
                (0.0, RealMatrix::identity(2))
            } else {
                let magnitude = self.uniform(0.1, 1.0 + self.cfg.scale);
                let sign = if self.chance(0.5) { 1.0 } else { -1.0 };
                let angle = self.uniform(0.0, TAU);
                let oi = if self.chance(0.5) { rotation(angle) } else { reflection(angle) };
                (sign * magnitude, oi)
            };
            let symplectic = oi.get(0, 0) * oi.get(1, 1) - oi.get(0, 1) * oi.get(1, 0) > 0.0;
            let bound = noise_bound(ti, symplectic);
            let li = if self.chance(BOUNDARY_PROB) {
                bound
            } else {
                bound + self.uniform(0.0, self.cfg.scale)
            };
            t.push(ti);
            o.push(oi);
            lambda.push(li);
        }
        IncoherentDecomposition::new(pi, t, o, lambda).expect("sampled within bounds")
    }

    pub fn channel(&mut self, kind: ChannelKind) -> GaussianChannel {
        let n = self.cfg.n;
        let dim = 2 * n;
        let sigma = self.cfg.scale / (dim as f64).sqrt();
        match kind {
            ChannelKind::Generic => {
                let k = self.gaussian_matrix(dim, dim, sigma);
                let floor = 0.5 * (k.frobenius_norm().powi(2) + 1.0);
                let m = SymMatrix::scaled_identity(dim, floor).try_add(&self.psd(dim)).expect("same shape");
                let dbar = if self.chance(0.5) { self.displacement(dim) } else { vec![0.0; dim] };
                GaussianChannel::new(k, m, dbar).expect("consistent shapes")
            }
            ChannelKind::Incoherent => {
                let d = self.incoherent_decomposition();
                synthesize_incoherent(&d).expect("sampled within bounds")
            }
            ChannelKind::Cb => {
                let lambdas: Vec<f64> = (0..n).map(|_| self.thermal_value()).collect();
                GaussianChannel::coherence_breaking(&lambdas)
            }
            ChannelKind::Cq => {
                // Rows of K lie in the isotropic span of the position rows of a symplectic S,
                // so KΔKᵀ = A Pₓ Δ Pₓᵀ Aᵀ = 0.
                let s = self.symplectic(n);
                let mut positions = RealMatrix::zeros(n, dim);
                for i in 0..n {
                    positions.set(i, 2 * i, 1.0);
                }
                let a = self.gaussian_matrix(dim, n, self.cfg.scale / (n as f64).sqrt());
                let k = &a * &(&positions * &s);
                let m = if self.chance(0.5) {
                    self.valid_cm(n)
                } else {
                    SymMatrix::scaled_identity(dim, 0.5).try_add(&self.psd(dim)).expect("same shape")
                };
                GaussianChannel::centered(k, m).expect("consistent shapes")
            }
            ChannelKind::ProductPreserving => {
                let pi = self.permutation(n);
                let mut k = RealMatrix::zeros(dim, dim);
                let mut m = SymMatrix::zeros(2);
                for (row, &col) in pi.iter().enumerate() {
                    let block = if self.chance(ZERO_GAIN_PROB) {
                        RealMatrix::zeros(2, 2)
                    } else {
                        self.gaussian_matrix(2, 2, self.cfg.scale / 2.0_f64.sqrt())
                    };
                    let floor = 0.5 * (block.frobenius_norm().powi(2) + 1.0);
                    let noise = SymMatrix::scaled_identity(2, floor).try_add(&self.psd(2)).expect("2x2");
                    k.set_block(2 * row, 2 * col, &block);
                    m = if row == 0 { noise } else { m.direct_sum(&noise) };
                }
                GaussianChannel::centered(k, m).expect("consistent shapes")
            }
        }
    }
}

pub fn sample_state(cfg: &SamplerConfig, kind: StateKind) -> Result<GaussianState> {
    Sampler::new(cfg).state(kind)
}

pub fn sample_channel(cfg: &SamplerConfig, kind: ChannelKind) -> GaussianChannel {
    Sampler::new(cfg).channel(kind)
}
