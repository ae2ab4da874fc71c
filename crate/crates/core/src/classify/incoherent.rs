//! Incoherent channels: `d̄ = 0`, `K = (P_π ⊗ I₂)(⊕ tᵢ Oᵢ)`, `M = ⊕ λ_{π(k)} I₂`.
//!
//! Indexing: `pi[k]` is the input mode routed to output mode `k`, so block
//! `(k, pi[k])` of `K` is `t[pi[k]] · O[pi[k]]` and block `k` of `M` is
//! `lambda[pi[k]] · I₂`. The gain, rotation and noise vectors are indexed by
//! input mode.

use serde::Serialize;

use crate::channels::{validate_channel, GaussianChannel};
use crate::error::{invalid, mismatch, Error, Refusal, Result};
use crate::matcore::{RealMatrix, SymMatrix};

const ORTHO_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncoherentDecomposition {
    pub pi: Vec<usize>,
    pub t: Vec<f64>,
    #[serde(rename = "O")]
    pub o: Vec<RealMatrix>,
    pub lambda: Vec<f64>,
    /// `det Oᵢ = +1`, i.e. `Oᵢ` is symplectic.
    pub symplectic: Vec<bool>,
    /// Input modes whose gain block is zero; paired with the zero output rows
    /// in ascending order and given `O = I`.
    pub zero_gain_modes: Vec<usize>,
}

/// Lowest noise that keeps a one-mode block `t·O` completely positive:
/// `½|t² − 1|` for symplectic `O`, `½(t² + 1)` otherwise.
pub fn noise_bound(t: f64, symplectic: bool) -> f64 {
    if symplectic {
        0.5 * (t * t - 1.0).abs()
    } else {
        0.5 * (t * t + 1.0)
    }
}

fn det2(o: &RealMatrix) -> f64 {
    o.get(0, 0) * o.get(1, 1) - o.get(0, 1) * o.get(1, 0)
}

fn orthogonality_defect(o: &RealMatrix) -> f64 {
    (&(&o.transpose() * o) - &RealMatrix::identity(2)).max_abs()
}

impl IncoherentDecomposition {
    /// Checks shapes, the permutation, orthogonality of each `Oᵢ`, and the noise
    /// bounds; symplectic flags are read off `det Oᵢ`.
    pub fn new(pi: Vec<usize>, t: Vec<f64>, o: Vec<RealMatrix>, lambda: Vec<f64>) -> Result<Self> {
        let n = pi.len();
        if t.len() != n || o.len() != n || lambda.len() != n {
            return Err(mismatch(format!(
                "pi has {n} entries but t, O, lambda have {}, {}, {}",
                t.len(),
                o.len(),
                lambda.len()
            )));
        }
        let symplectic = o.iter().map(|oi| oi.rows() == 2 && oi.cols() == 2 && det2(oi) > 0.0).collect();
        let zero_gain_modes = (0..n).filter(|&i| t[i] == 0.0).collect();
        let d = Self {
            pi,
            t,
            o,
            lambda,
            symplectic,
            zero_gain_modes,
        };
        d.check()?;
        Ok(d)
    }

    /// Verifies every invariant of the parameterization.
    pub fn check(&self) -> Result<()> {
        let n = self.pi.len();
        if n == 0 {
            return Err(invalid("decomposition needs at least one mode"));
        }
        if [self.t.len(), self.o.len(), self.lambda.len(), self.symplectic.len()]
            .iter()
            .any(|&len| len != n)
        {
            return Err(mismatch("decomposition vectors have unequal lengths"));
        }
        let mut seen = vec![false; n];
        for &j in &self.pi {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(invalid(format!("{:?} is not a permutation of 0..{n}", self.pi)));
            }
        }
        for (i, oi) in self.o.iter().enumerate() {
            if oi.rows() != 2 || oi.cols() != 2 {
                return Err(mismatch(format!("O[{i}] must be 2x2")));
            }
            if orthogonality_defect(oi) > ORTHO_TOL {
                return Err(invalid(format!("O[{i}] is not orthogonal")));
            }
            if (det2(oi) > 0.0) != self.symplectic[i] {
                return Err(invalid(format!("symplectic flag of O[{i}] disagrees with its determinant")));
            }
        }
        for i in 0..n {
            let bound = noise_bound(self.t[i], self.symplectic[i]);
            if self.lambda[i] < bound - BOUND_SLACK {
                return Err(invalid(format!(
                    "noise {} on input mode {i} is below the bound {bound}",
                    self.lambda[i]
                )));
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.pi.len()
    }
}

/// Assembles the channel `(K, M, 0)` of a decomposition.
pub fn synthesize_incoherent(d: &IncoherentDecomposition) -> Result<GaussianChannel> {
    d.check()?;
    let n = d.modes();
    let mut k = RealMatrix::zeros(2 * n, 2 * n);
    let mut diag = vec![0.0; 2 * n];
    for (row, &j) in d.pi.iter().enumerate() {
        k.set_block(2 * row, 2 * j, &d.o[j].scale(d.t[j]));
        diag[2 * row] = d.lambda[j];
        diag[2 * row + 1] = d.lambda[j];
    }
    GaussianChannel::centered(k, SymMatrix::from_diagonal(&diag))
}

/// Routing of a block-monomial gain matrix: `pi[k]` is the unique input block
/// column feeding output block row `k`. Blocks count as nonzero when their
/// Frobenius norm exceeds `tol · (1 + ‖K‖_F)`. Rows and columns without any
/// nonzero block are paired in ascending order.
pub(crate) fn block_routing(k: &RealMatrix, tol: f64) -> std::result::Result<Vec<usize>, Refusal> {
    let n = k.rows() / 2;
    let threshold = tol * (1.0 + k.frobenius_norm());
    let nonzero = |r: usize, c: usize| k.block(2 * r, 2 * c, 2, 2).frobenius_norm() > threshold;

    let mut pi: Vec<Option<usize>> = vec![None; n];
    let mut col_count = vec![0usize; n];
    for (row, slot) in pi.iter_mut().enumerate() {
        let support: Vec<usize> = (0..n).filter(|&c| nonzero(row, c)).collect();
        if support.len() > 1 {
            return Err(Refusal::RowSupport {
                row,
                count: support.len(),
            });
        }
        if let Some(&c) = support.first() {
            col_count[c] += 1;
            *slot = Some(c);
        }
    }
    if let Some((col, &count)) = col_count.iter().enumerate().find(|(_, &c)| c > 1) {
        return Err(Refusal::ColumnSupport { col, count });
    }
    let mut free_cols = (0..n).filter(|&c| col_count[c] == 0);
    Ok(pi
        .into_iter()
        .map(|slot| slot.unwrap_or_else(|| free_cols.next().expect("free rows and columns pair up")))
        .collect())
}

/// Recovers `(π, t, O, λ)` from an incoherent channel, or reports the first
/// violated structural condition as [`Error::NotIncoherent`].
///
/// `t` is returned non-negative; `(t, O)` and `(−t, −O)` give the same channel.
pub fn decompose_incoherent(c: &GaussianChannel, tol: f64) -> Result<IncoherentDecomposition> {
    if !validate_channel(c) {
        return Err(invalid("channel violates complete positivity"));
    }
    let refuse = |r| Err(Error::NotIncoherent(r));
    let n = c.modes();

    let dmax = c.dbar().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if dmax > tol {
        return refuse(Refusal::DisplacementNonZero { max_abs: dmax });
    }

    let m = c.m();
    let m_threshold = tol * (1.0 + m.frobenius_norm());
    let mut noise = vec![0.0; n];
    for row in 0..n {
        for col in 0..n {
            let b = m.as_matrix().block(2 * row, 2 * col, 2, 2);
            let deviation = if row == col {
                let mean = 0.5 * (b.get(0, 0) + b.get(1, 1));
                noise[row] = mean;
                (b.get(0, 0) - mean).abs().max(b.get(0, 1).abs())
            } else {
                b.max_abs()
            };
            if deviation > m_threshold {
                return refuse(Refusal::NoiseNotScalar { row, col, deviation });
            }
        }
    }

    let k = c.k();
    let pi = match block_routing(k, tol) {
        Ok(pi) => pi,
        Err(r) => return refuse(r),
    };
    let support_threshold = tol * (1.0 + k.frobenius_norm());

    let mut t = vec![0.0; n];
    let mut o = vec![RealMatrix::identity(2); n];
    let mut lambda = vec![0.0; n];
    for (row, &col) in pi.iter().enumerate() {
        lambda[col] = noise[row];
        let block = k.block(2 * row, 2 * col, 2, 2);
        let norm = block.frobenius_norm();
        if norm <= support_threshold {
            continue;
        }
        let gain = norm / std::f64::consts::SQRT_2;
        let gram = &block.transpose() * &block;
        let residual = (&gram - &RealMatrix::identity(2).scale(gain * gain)).max_abs();
        if residual > tol * (1.0 + gain * gain) {
            return refuse(Refusal::NotScaledOrthogonal { row, col, residual });
        }
        t[col] = gain;
        o[col] = block.scale(1.0 / gain);
    }

    let slack = tol * (1.0 + m.frobenius_norm() + k.frobenius_norm().powi(2));
    let symplectic: Vec<bool> = o.iter().map(|oi| det2(oi) > 0.0).collect();
    for mode in 0..n {
        let bound = noise_bound(t[mode], symplectic[mode]);
        if lambda[mode] < bound - slack {
            return refuse(Refusal::BelowBound {
                mode,
                lambda: lambda[mode],
                bound,
            });
        }
    }
    let zero_gain_modes = (0..n).filter(|&i| t[i] == 0.0).collect();
    Ok(IncoherentDecomposition {
        pi,
        t,
        o,
        lambda,
        symplectic,
        zero_gain_modes,
    })
}
