//! JSON documents for states, channels and modulated ensembles.
//!
//! Every document carries `"units": "vacuum=1/2"`; anything else is refused.
//! Loaders check layout and dimensions only. Physical validity (uncertainty
//! relation, complete positivity) is left to the caller.

use serde::{Deserialize, Serialize};

use crate::capacity::ModulatedEnsemble;
use crate::channels::GaussianChannel;
use crate::error::{schema, Error, Result};
use crate::matcore::{RealMatrix, SymMatrix};
use crate::phase_space::GaussianState;

pub const UNITS: &str = "vacuum=1/2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub n: usize,
    pub nu: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    pub units: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: Vec<Vec<f64>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    pub dbar: Vec<f64>,
    pub units: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub seed: StateDoc,
    pub nu_mod: Vec<Vec<f64>>,
    pub units: String,
}

fn check_units(units: &str) -> Result<()> {
    if units != UNITS {
        return Err(schema(format!("units must be {UNITS:?}, got {units:?}")));
    }
    Ok(())
}

fn square(rows: &[Vec<f64>], dim: usize, name: &str) -> Result<RealMatrix> {
    if dim == 0 {
        return Err(schema("n must be at least 1"));
    }
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(schema(format!("{name} must be {dim}x{dim}")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(schema(format!("{name} has non-finite entries")));
    }
    RealMatrix::from_rows(rows).map_err(|e| schema(e.to_string()))
}

fn symmetric(rows: &[Vec<f64>], dim: usize, name: &str) -> Result<SymMatrix> {
    let m = square(rows, dim, name)?;
    let asym = (&m - &m.transpose()).max_abs();
    if asym > 1e-9 * (1.0 + m.max_abs()) {
        return Err(schema(format!("{name} is not symmetric (max asymmetry {asym:e})")));
    }
    SymMatrix::new(m).map_err(|e| schema(e.to_string()))
}

fn vector(v: &[f64], dim: usize, name: &str) -> Result<Vec<f64>> {
    if v.len() != dim {
        return Err(schema(format!("{name} must have {dim} entries, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(schema(format!("{name} has non-finite entries")));
    }
    Ok(v.to_vec())
}

impl StateDoc {
    pub fn from_state(s: &GaussianState) -> Self {
        Self {
            n: s.modes(),
            nu: s.nu().to_rows(),
            d: s.d().to_vec(),
            units: UNITS.into(),
        }
    }

    pub fn into_state(self) -> Result<GaussianState> {
        check_units(&self.units)?;
        let dim = 2 * self.n;
        let nu = symmetric(&self.nu, dim, "nu")?;
        let d = vector(&self.d, dim, "d")?;
        GaussianState::new(nu, d)
    }
}

impl ChannelDoc {
    pub fn from_channel(c: &GaussianChannel) -> Self {
        Self {
            n: c.modes(),
            k: c.k().to_rows(),
            m: c.m().to_rows(),
            dbar: c.dbar().to_vec(),
            units: UNITS.into(),
        }
    }

    pub fn into_channel(self) -> Result<GaussianChannel> {
        check_units(&self.units)?;
        let dim = 2 * self.n;
        let k = square(&self.k, dim, "K")?;
        let m = symmetric(&self.m, dim, "M")?;
        let dbar = vector(&self.dbar, dim, "dbar")?;
        GaussianChannel::new(k, m, dbar)
    }
}

impl EnsembleDoc {
    pub fn from_ensemble(e: &ModulatedEnsemble) -> Self {
        Self {
            seed: StateDoc::from_state(e.seed()),
            nu_mod: e.nu_mod().to_rows(),
            units: UNITS.into(),
        }
    }

    /// Also rejects invalid seeds and indefinite modulation, which
    /// [`ModulatedEnsemble::new`] refuses.
    pub fn into_ensemble(self) -> Result<ModulatedEnsemble> {
        self.into_ensemble_with(crate::DEFAULT_TOL)
    }

    pub fn into_ensemble_with(self, tol: f64) -> Result<ModulatedEnsemble> {
        check_units(&self.units)?;
        let n = self.seed.n;
        let seed = self.seed.into_state()?;
        let nu_mod = symmetric(&self.nu_mod, 2 * n, "nu_mod")?;
        ModulatedEnsemble::with_tol(seed, nu_mod, tol)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

pub fn state_from_json(text: &str) -> Result<GaussianState> {
    parse::<StateDoc>(text)?.into_state()
}

pub fn channel_from_json(text: &str) -> Result<GaussianChannel> {
    parse::<ChannelDoc>(text)?.into_channel()
}

pub fn ensemble_from_json(text: &str) -> Result<ModulatedEnsemble> {
    parse::<EnsembleDoc>(text)?.into_ensemble()
}

pub fn state_to_json(s: &GaussianState) -> String {
    serde_json::to_string_pretty(&StateDoc::from_state(s)).expect("plain data")
}

pub fn channel_to_json(c: &GaussianChannel) -> String {
    serde_json::to_string_pretty(&ChannelDoc::from_channel(c)).expect("plain data")
}

pub fn ensemble_to_json(e: &ModulatedEnsemble) -> String {
    serde_json::to_string_pretty(&EnsembleDoc::from_ensemble(e)).expect("plain data")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        schema(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip() {
        let s = GaussianState::new(GaussianState::tmsv(0.37).into_parts().0, vec![0.1, -2.0 / 3.0, 1e-300, 7.0]).unwrap();
        assert_eq!(state_from_json(&state_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn channel_round_trip() {
        let c = GaussianChannel::new(
            RealMatrix::from_rows(&[[0.1, 0.2], [1.0 / 3.0, -0.4]]).unwrap(),
            SymMatrix::from_rows(&[[1.0, 0.25], [0.25, 2.0]]).unwrap(),
            vec![std::f64::consts::PI, 0.0],
        )
        .unwrap();
        let text = channel_to_json(&c);
        assert!(text.contains("\"K\"") && text.contains("\"M\""));
        assert_eq!(channel_from_json(&text).unwrap(), c);
    }

    #[test]
    fn ensemble_round_trip() {
        let e = ModulatedEnsemble::new(GaussianState::vacuum(1), SymMatrix::scaled_identity(2, 0.7)).unwrap();
        assert_eq!(ensemble_from_json(&ensemble_to_json(&e)).unwrap(), e);
    }

    #[test]
    fn refusals() {
        let wrong_units = r#"{"n":1,"nu":[[0.5,0],[0,0.5]],"d":[0,0],"units":"vacuum=1"}"#;
        assert!(matches!(state_from_json(wrong_units), Err(Error::Schema(_))));
        let missing_units = r#"{"n":1,"nu":[[0.5,0],[0,0.5]],"d":[0,0]}"#;
        assert!(matches!(state_from_json(missing_units), Err(Error::Schema(_))));
        let wrong_n = r#"{"n":2,"nu":[[0.5,0],[0,0.5]],"d":[0,0],"units":"vacuum=1/2"}"#;
        assert!(matches!(state_from_json(wrong_n), Err(Error::Schema(_))));
        let ragged = r#"{"n":1,"nu":[[0.5,0],[0]],"d":[0,0],"units":"vacuum=1/2"}"#;
        assert!(matches!(state_from_json(ragged), Err(Error::Schema(_))));
        let asym = r#"{"n":1,"nu":[[0.5,0.2],[0,0.5]],"d":[0,0],"units":"vacuum=1/2"}"#;
        assert!(matches!(state_from_json(asym), Err(Error::Schema(_))));
        assert!(matches!(state_from_json("not json"), Err(Error::Schema(_))));
        let extra = r#"{"n":1,"K":[[1,0],[0,1]],"M":[[0,0],[0,0]],"dbar":[0,0],"units":"vacuum=1/2","x":1}"#;
        assert!(matches!(channel_from_json(extra), Err(Error::Schema(_))));
    }

    #[test]
    fn loaders_leave_physics_to_callers() {
        // Below the vacuum: well-formed but unphysical.
        let s = state_from_json(r#"{"n":1,"nu":[[0.1,0],[0,0.1]],"d":[0,0],"units":"vacuum=1/2"}"#).unwrap();
        assert!(!s.is_valid(1e-9));
    }
}
