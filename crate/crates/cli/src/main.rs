//! `gausscb` command-line frontend.
//!
//! Every invocation prints exactly one JSON document on stdout. Exit codes:
//! 0 on success, 1 on malformed input (bad flags, unreadable files, schema or
//! units errors), 2 when the input is well formed but fails a validity check.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use gausscb::audit::{audit_additivity_batch, audit_inclusions, AuditConfig};
use gausscb::capacity::{additivity_audit_with, holevo_chi_with, ModulatedEnsemble};
use gausscb::channels::{apply_with, tensor_channels};
use gausscb::classify::{classify_with, decompose_incoherent, DEFAULT_MAX_ITER};
use gausscb::io::{ChannelDoc, EnsembleDoc, StateDoc};
use gausscb::phase_space::{entropy_with, symplectic_eigenvalues, tensor_states};
use gausscb::sampling::{ChannelKind, Sampler, SamplerConfig, StateKind};
use gausscb::{Error, GaussianChannel, GaussianState, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "gausscb", version, about = "Gaussian channel classification and capacity audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Numerical tolerance for every PSD and class test.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also write the JSON document to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the uncertainty relation of a state.
    ValidateState {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check complete positivity of a channel.
    ValidateChannel {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every class predicate on a channel.
    Classify {
        #[arg(long)]
        channel: PathBuf,
        /// Iteration budget of the entanglement-breaking search.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Recover (pi, t, O, lambda) of an incoherent channel.
    Decompose {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Apply a channel to a state.
    Apply {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Tensor product of two or more channels, or of two or more states.
    Tensor {
        #[arg(long)]
        channel: Vec<PathBuf>,
        #[arg(long)]
        state: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Von Neumann entropy in nats.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Holevo chi of a channel on a displacement-modulated ensemble.
    Chi {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Additivity of chi for CB (x) Psi. Pass two channels and an ensemble for
    /// one instance, or none to run a seeded batch.
    AuditAdditivity {
        /// The CB channel, then Psi.
        #[arg(long)]
        channel: Vec<PathBuf>,
        #[arg(long)]
        ensemble: Option<PathBuf>,
        /// Number of copies; repeat for several.
        #[arg(long, default_values_t = [1usize])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Check CB => CQ => EB => PPT over sampled channels.
    AuditInclusions {
        #[arg(long, value_parser = parse_channel_kind, default_value = "generic")]
        kind: ChannelKind,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest mode count; trial i uses 1 + i % modes.
        #[arg(long, default_value_t = 3)]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a seeded state or channel.
    ///
    /// Channel kinds: generic, incoherent, cb, cq, product-preserving.
    /// State kinds: thermal, squeezed, displaced, generic-state, tmsv.
    Sample {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Squeezing parameter for tmsv.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_channel_kind(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Why a command did not succeed.
enum Failure {
    Malformed(String),
    Invalid(String, Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema(_) | Error::DimensionMismatch(_) => Failure::Malformed(e.to_string()),
            other => Failure::Invalid(other.to_string(), Value::Null),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<GaussianState, Failure> {
    Ok(parse::<StateDoc>(path)?.into_state()?)
}

fn load_channel(path: &Path) -> Result<GaussianChannel, Failure> {
    Ok(parse::<ChannelDoc>(path)?.into_channel()?)
}

fn load_ensemble(path: &Path, tol: f64) -> Result<ModulatedEnsemble, Failure> {
    let doc = parse::<EnsembleDoc>(path)?;
    // Layout problems are malformed input; an unphysical seed or indefinite
    // modulation is a validation failure.
    match doc.into_ensemble_with(tol) {
        Ok(e) => Ok(e),
        Err(Error::InvalidArgument(msg)) => Err(Failure::Invalid(msg, Value::Null)),
        Err(e) => Err(e.into()),
    }
}

fn require_state(s: &GaussianState, tol: f64) -> Result<(), Failure> {
    if s.is_valid(tol) {
        Ok(())
    } else {
        Err(Failure::Invalid("state violates the uncertainty relation".into(), Value::Null))
    }
}

fn require_channel(c: &GaussianChannel, tol: f64) -> Result<(), Failure> {
    if c.is_valid(tol) {
        Ok(())
    } else {
        Err(Failure::Invalid(
            "channel violates complete positivity".into(),
            json!({ "cp_min_eigenvalue": c.cp_min_eigenvalue() }),
        ))
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

/// Adds `tol` to a report. State and channel documents (marked by `units`) are
/// left alone so they load back unchanged.
fn with_tol(mut v: Value, tol: f64) -> Value {
    if let Value::Object(map) = &mut v {
        if map.contains_key("units") {
            return v;
        }
        map.insert("tol".into(), json!(tol));
    }
    v
}

fn validate_state_cmd(state: &Path, tol: f64) -> Outcome {
    let s = load_state(state)?;
    let valid = s.is_valid(tol);
    let report = json!({
        "valid": valid,
        "n": s.modes(),
        "symplectic_eigenvalues": symplectic_eigenvalues(s.nu()).ok(),
    });
    if valid {
        Ok(report)
    } else {
        Err(Failure::Invalid("state violates the uncertainty relation".into(), report))
    }
}

fn validate_channel_cmd(channel: &Path, tol: f64) -> Outcome {
    let c = load_channel(channel)?;
    let valid = c.is_valid(tol);
    let report = json!({
        "valid": valid,
        "n": c.modes(),
        "cp_min_eigenvalue": c.cp_min_eigenvalue(),
    });
    if valid {
        Ok(report)
    } else {
        Err(Failure::Invalid("channel violates complete positivity".into(), report))
    }
}

fn decompose_cmd(channel: &Path, tol: f64) -> Outcome {
    let c = load_channel(channel)?;
    require_channel(&c, tol)?;
    Ok(match decompose_incoherent(&c, tol) {
        Ok(d) => json!({ "is_incoherent": true, "decomposition": d, "refusal": null }),
        Err(Error::NotIncoherent(r)) => json!({ "is_incoherent": false, "decomposition": null, "refusal": r.to_string() }),
        Err(e) => return Err(e.into()),
    })
}

fn tensor_cmd(channels: &[PathBuf], states: &[PathBuf], tol: f64) -> Outcome {
    match (channels.len(), states.len()) {
        (0, s) if s >= 2 => {
            let mut parts = states.iter().map(|p| load_state(p));
            let first = parts.next().expect("nonempty")?;
            let joint = parts.try_fold(first, |acc, s| s.map(|s| tensor_states(&acc, &s)))?;
            require_state(&joint, tol)?;
            Ok(to_value(&StateDoc::from_state(&joint)))
        }
        (c, 0) if c >= 2 => {
            let mut parts = channels.iter().map(|p| load_channel(p));
            let first = parts.next().expect("nonempty")?;
            let joint = parts.try_fold(first, |acc, c| c.map(|c| tensor_channels(&acc, &c)))?;
            require_channel(&joint, tol)?;
            Ok(to_value(&ChannelDoc::from_channel(&joint)))
        }
        _ => Err(Failure::Malformed(
            "tensor needs two or more --channel files or two or more --state files, not both".into(),
        )),
    }
}

fn additivity_cmd(channels: &[PathBuf], ensemble: Option<&Path>, ks: &[usize], trials: usize, seed: u64, tol: f64) -> Outcome {
    if ks.contains(&0) {
        return Err(Failure::Malformed("--k must be at least 1".into()));
    }
    match (channels, ensemble) {
        ([cb, psi], Some(ensemble)) => {
            let (cb, psi) = (load_channel(cb)?, load_channel(psi)?);
            let e = load_ensemble(ensemble, tol)?;
            require_channel(&cb, tol)?;
            require_channel(&psi, tol)?;
            let reports = ks
                .iter()
                .map(|&k| additivity_audit_with(&cb, &psi, &e, k, tol))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if let [single] = reports.as_slice() {
                with_tol(to_value(single), tol)
            } else {
                json!({ "reports": reports, "tol": tol })
            })
        }
        ([], None) => {
            let cfg = AuditConfig {
                tol,
                ..AuditConfig::new(trials, seed)
            };
            Ok(with_tol(to_value(&audit_additivity_batch(&cfg, ks)?), tol))
        }
        _ => Err(Failure::Malformed(
            "audit-additivity takes --channel CB --channel PSI --ensemble FILE, or none of them for a sampled batch".into(),
        )),
    }
}

fn sample_cmd(kind: &str, seed: u64, modes: usize, scale: f64, r: f64) -> Outcome {
    let cfg = SamplerConfig::new(seed, modes, scale).map_err(|e| Failure::Malformed(e.to_string()))?;
    let mut sampler = Sampler::new(&cfg);
    let state_kind = match kind {
        "thermal" => Some(StateKind::Thermal),
        "squeezed" => Some(StateKind::Squeezed),
        "displaced" => Some(StateKind::Displaced),
        "generic-state" => Some(StateKind::Generic),
        "tmsv" => Some(StateKind::Tmsv(r)),
        _ => None,
    };
    if let Some(k) = state_kind {
        let s = sampler.state(k).map_err(|e| Failure::Malformed(e.to_string()))?;
        return Ok(to_value(&StateDoc::from_state(&s)));
    }
    let k: ChannelKind = kind.parse().map_err(|e: Error| Failure::Malformed(e.to_string()))?;
    Ok(to_value(&ChannelDoc::from_channel(&sampler.channel(k))))
}

fn execute(command: Command) -> (Common, Outcome) {
    match command {
        Command::ValidateState { state, common } => {
            let r = validate_state_cmd(&state, common.tol);
            (common, r)
        }
        Command::ValidateChannel { channel, common } => {
            let r = validate_channel_cmd(&channel, common.tol);
            (common, r)
        }
        Command::Classify { channel, max_iter, common } => {
            let r = (|| {
                let c = load_channel(&channel)?;
                require_channel(&c, common.tol)?;
                Ok(to_value(&classify_with(&c, common.tol, max_iter)?))
            })();
            (common, r)
        }
        Command::Decompose { channel, common } => {
            let r = decompose_cmd(&channel, common.tol);
            (common, r)
        }
        Command::Apply { channel, state, common } => {
            let r = (|| {
                let (c, s) = (load_channel(&channel)?, load_state(&state)?);
                if c.modes() != s.modes() {
                    return Err(Failure::Malformed(format!(
                        "channel acts on {} modes, state has {}",
                        c.modes(),
                        s.modes()
                    )));
                }
                require_channel(&c, common.tol)?;
                require_state(&s, common.tol)?;
                Ok(to_value(&StateDoc::from_state(&apply_with(&c, &s, common.tol)?)))
            })();
            (common, r)
        }
        Command::Tensor { channel, state, common } => {
            let r = tensor_cmd(&channel, &state, common.tol);
            (common, r)
        }
        Command::Entropy { state, common } => {
            let r = (|| {
                let s = load_state(&state)?;
                require_state(&s, common.tol)?;
                Ok(json!({ "entropy_nats": entropy_with(&s, common.tol)? }))
            })();
            (common, r)
        }
        Command::Chi { channel, ensemble, common } => {
            let r = (|| {
                let c = load_channel(&channel)?;
                let e = load_ensemble(&ensemble, common.tol)?;
                require_channel(&c, common.tol)?;
                Ok(json!({ "chi_nats": holevo_chi_with(&c, &e, common.tol)? }))
            })();
            (common, r)
        }
        Command::AuditAdditivity {
            channel,
            ensemble,
            k,
            trials,
            seed,
            common,
        } => {
            let r = additivity_cmd(&channel, ensemble.as_deref(), &k, trials, seed, common.tol);
            (common, r)
        }
        Command::AuditInclusions {
            kind,
            trials,
            seed,
            modes,
            scale,
            max_iter,
            common,
        } => {
            let cfg = AuditConfig {
                tol: common.tol,
                max_modes: modes,
                scale,
                max_iter,
                ..AuditConfig::new(trials, seed)
            };
            let r = match audit_inclusions(kind, &cfg) {
                Ok(report) if report.violations == 0 => Ok(to_value(&report)),
                Ok(report) => Err(Failure::Invalid("inclusion chain violated".into(), to_value(&report))),
                Err(e) => Err(Failure::Malformed(e.to_string())),
            };
            (common, r)
        }
        Command::Sample {
            kind,
            seed,
            modes,
            scale,
            r,
            common,
        } => {
            let out = sample_cmd(&kind, seed, modes, scale, r);
            (common, out)
        }
    }
}

fn diagnostic(kind: &str, message: &str, detail: Value) -> Value {
    let mut map = Map::new();
    map.insert("error".into(), json!({ "kind": kind, "message": message }));
    if let Value::Object(d) = detail {
        map.extend(d);
    }
    Value::Object(map)
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<(), String> {
    let text = format!("{}\n", serde_json::to_string(doc).expect("plain data"));
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("cannot write to stdout: {e}")),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.kind().to_string();
            eprint!("{e}");
            let _ = emit(&diagnostic("malformed-input", &message, Value::Null), None);
            return ExitCode::from(1);
        }
    };
    let (common, mut outcome) = execute(cli.command);
    let tol = common.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        outcome = Err(Failure::Malformed("--tol must be a positive finite number".into()));
    }
    let (doc, code) = match outcome {
        Ok(v) => (with_tol(v, tol), 0),
        Err(Failure::Malformed(msg)) => (with_tol(diagnostic("malformed-input", &msg, Value::Null), tol), 1),
        Err(Failure::Invalid(msg, detail)) => (with_tol(diagnostic("validation-failure", &msg, detail), tol), 2),
    };
    if let Err(msg) = emit(&doc, common.out.as_deref()) {
        eprintln!("{msg}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
