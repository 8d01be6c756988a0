//! Experiment configuration files (TOML) and the medium spec section.
//!
//! A config names one experiment, a list of periods `L`, one or more media
//! and optional `solver`, `params` and `output` sections:
//!
//! ```toml
//! experiment = "speed-sweep"
//! L = [12, 24, 48]
//! jobs = 4
//!
//! [medium]
//! kind = "cubic"
//! a = 1.0
//! b = { mean = 0.25, sin = [0.1] }
//!
//! [solver]
//! h = 0.05
//! dt = 0.01
//! ```
//!
//! Extra media go under `[media.<name>]`; they follow `[medium]` in name
//! order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pulsefront_core::fronts::FrontConfig;
use pulsefront_core::medium::{make_a4_medium_with, make_cubic_medium, Periodic, Reaction, ReactionTable};
use pulsefront_core::PeriodicMedium;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Error;

/// A periodic coefficient: a number, a Fourier series or a table of samples
/// at `j/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefSpec {
    Constant(f64),
    Fourier {
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Table {
        table: Vec<f64>,
    },
}

impl CoefSpec {
    pub fn to_periodic(&self) -> Periodic {
        match self {
            CoefSpec::Constant(c) => Periodic::Constant(*c),
            CoefSpec::Fourier { mean, cos, sin } => Periodic::Fourier { mean: *mean, cos: cos.clone(), sin: sin.clone() },
            CoefSpec::Table { table } => Periodic::Table(table.clone()),
        }
    }

    pub fn from_periodic(p: &Periodic) -> Self {
        match p {
            Periodic::Constant(c) => CoefSpec::Constant(*c),
            Periodic::Fourier { mean, cos, sin } => CoefSpec::Fourier { mean: *mean, cos: cos.clone(), sin: sin.clone() },
            Periodic::Table(v) => CoefSpec::Table { table: v.clone() },
        }
    }
}

fn unit_coef() -> CoefSpec {
    CoefSpec::Constant(1.0)
}

fn unit() -> f64 {
    1.0
}

/// `kind = cubic | a4 | custom-table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MediumSpec {
    Cubic {
        #[serde(default = "unit_coef")]
        a: CoefSpec,
        b: CoefSpec,
    },
    A4 {
        #[serde(default = "unit")]
        a: f64,
        base_b: f64,
        amp: f64,
        delta0p: f64,
    },
    /// `values[i * nu + j] = f(i / nx, j / (nu - 1))`.
    CustomTable {
        #[serde(default = "unit_coef")]
        a: CoefSpec,
        nx: usize,
        nu: usize,
        values: Vec<f64>,
    },
}

impl MediumSpec {
    pub fn build(&self) -> Result<PeriodicMedium, Error> {
        let m = match self {
            MediumSpec::Cubic { a, b } => make_cubic_medium(a.to_periodic(), b.to_periodic())?,
            MediumSpec::A4 { a, base_b, amp, delta0p } => make_a4_medium_with(*a, *base_b, *amp, *delta0p)?,
            MediumSpec::CustomTable { a, nx, nu, values } => {
                let t = ReactionTable::new(*nx, *nu, values.clone())?;
                PeriodicMedium::new(a.to_periodic(), Reaction::Table(t))?
            }
        };
        Ok(m)
    }

    /// Inverse of [`MediumSpec::build`].
    pub fn from_medium(m: &PeriodicMedium) -> Self {
        let a = CoefSpec::from_periodic(m.diffusivity());
        match m.reaction() {
            Reaction::Cubic { b } => MediumSpec::Cubic { a, b: CoefSpec::from_periodic(b) },
            Reaction::A4 { base_b, amp, delta0p } => {
                let a = match a {
                    CoefSpec::Constant(c) => c,
                    _ => unreachable!("A4 media have constant diffusivity"),
                };
                MediumSpec::A4 { a, base_b: *base_b, amp: *amp, delta0p: *delta0p }
            }
            Reaction::Table(t) => MediumSpec::CustomTable { a, nx: t.nx, nu: t.nu, values: t.values.clone() },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("medium specs always serialize")
    }

    pub fn from_toml(s: &str) -> Result<Self, Error> {
        Ok(toml::from_str(s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SpeedSweep,
    ProfileSweep,
    WidthSweep,
    SignClassify,
    EnvelopeAudit,
    ZerosAudit,
    ReverseSpeed,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SpeedSweep,
        ExperimentKind::ProfileSweep,
        ExperimentKind::WidthSweep,
        ExperimentKind::SignClassify,
        ExperimentKind::EnvelopeAudit,
        ExperimentKind::ZerosAudit,
        ExperimentKind::ReverseSpeed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SpeedSweep => "speed-sweep",
            ExperimentKind::ProfileSweep => "profile-sweep",
            ExperimentKind::WidthSweep => "width-sweep",
            ExperimentKind::SignClassify => "sign-classify",
            ExperimentKind::EnvelopeAudit => "envelope-audit",
            ExperimentKind::ZerosAudit => "zeros-audit",
            ExperimentKind::ReverseSpeed => "reverse-speed",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// `solver { h, dt, snapshot_stride, domain_pad }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub h: f64,
    pub dt: f64,
    pub snapshot_stride: Option<usize>,
    pub domain_pad: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let f = FrontConfig::default();
        Self { h: f.h, dt: f.dt, snapshot_stride: None, domain_pad: f.pad }
    }
}

impl SolverSection {
    pub fn front_config(&self) -> FrontConfig {
        FrontConfig { h: self.h, dt: self.dt, pad: self.domain_pad, snapshot_stride: self.snapshot_stride, ..Default::default() }
    }
}

/// Experiment knobs with fixed defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Envelope width.
    pub eps: f64,
    /// Band for width statistics.
    pub delta: f64,
    /// Lattice offset of the envelope audit.
    pub y: f64,
    /// Rows of the extracted front lattice and nodes of wave families.
    pub n_y: usize,
    pub profile_window: f64,
    pub zeta_window: f64,
    /// Stationary comparators as fractions of delta0.
    pub delta_fractions: Vec<f64>,
    pub checkpoints: usize,
    pub half_length: f64,
    pub zeros_t_end: f64,
    /// Dead zone; calibrated from the grid when absent.
    pub band: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            eps: 0.05,
            delta: 0.1,
            y: 0.3,
            n_y: 16,
            profile_window: 8.0,
            zeta_window: 4.0,
            delta_fractions: vec![0.25, 0.5, 1.0],
            checkpoints: 20,
            half_length: 80.0,
            zeros_t_end: 60.0,
            band: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Also write `(t, x, u)` snapshot CSVs for recorded fronts.
    pub snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), snapshots: false }
    }
}

fn one_job() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    #[serde(default = "one_job")]
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub media: BTreeMap<String, MediumSpec>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSection,
}

/// The parts of a config that determine results; `jobs` and `output` are
/// left out so the hash does not depend on them.
#[derive(Serialize)]
struct HashedView<'a> {
    experiment: ExperimentKind,
    #[serde(rename = "L")]
    l: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    medium: &'a Option<MediumSpec>,
    media: &'a BTreeMap<String, MediumSpec>,
    solver: &'a SolverSection,
    params: &'a Params,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    fn check(&self) -> Result<(), Error> {
        if self.medium.is_none() && self.media.is_empty() {
            return Err(Error::Config("no [medium] or [media.<name>] section".into()));
        }
        if self.l.is_empty() {
            return Err(Error::Config("L list is empty".into()));
        }
        if let Some(l) = self.l.iter().find(|l| !(**l >= 4.0)) {
            return Err(Error::Config(format!("L = {l} below 4")));
        }
        let s = &self.solver;
        if !(s.h > 0.0 && s.dt > 0.0 && s.domain_pad >= 0.0) {
            return Err(Error::Config(format!("bad solver section {s:?}")));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let p = &self.params;
        if !(p.eps > 0.0 && p.delta > 0.0 && p.delta < 0.5 && p.n_y > 0 && p.checkpoints >= 2) {
            return Err(Error::Config(format!("bad params section {p:?}")));
        }
        Ok(())
    }

    /// `[medium]` first, then `[media.*]` in name order.
    pub fn medium_specs(&self) -> Vec<(String, &MediumSpec)> {
        self.medium
            .iter()
            .map(|m| ("medium".to_string(), m))
            .chain(self.media.iter().map(|(k, v)| (k.clone(), v)))
            .collect()
    }

    pub fn build_media(&self) -> Result<Vec<(String, PeriodicMedium)>, Error> {
        self.medium_specs()
            .into_iter()
            .map(|(name, spec)| spec.build().map(|m| (name.clone(), m)).map_err(|e| Error::Medium(name, Box::new(e))))
            .collect()
    }

    /// SHA-256 over the canonical serialization of the result-determining
    /// sections, hex encoded.
    pub fn hash(&self) -> String {
        let view = HashedView {
            experiment: self.experiment,
            l: &self.l,
            medium: &self.medium,
            media: &self.media,
            solver: &self.solver,
            params: &self.params,
        };
        let text = toml::to_string(&view).expect("configs always serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
