//! Job files: `{"command": ..., "seed": ..., "params": {...}}` with typed
//! parameter blocks per command. Unknown fields are rejected everywhere.

use std::fmt;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use sbforms_core::domain::Region;
use sbforms_core::fourier::{CuspData, ModeSpec};
use sbforms_core::group::GroupElement;
use sbforms_core::satake::{Exponent, GrowthProfile};
use sbforms_core::superfunc::{FunctionSpec, SuperFunctionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    FourierExpand,
    KoecherCheck,
    SatakeClassify,
    MeasureCheck,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Verify => "verify",
            Command::FourierExpand => "fourier-expand",
            Command::KoecherCheck => "koecher-check",
            Command::SatakeClassify => "satake-classify",
            Command::MeasureCheck => "measure-check",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identity,
    Cayley,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyTolerances {
    pub cocycle: f64,
    pub delta_law: f64,
    pub jacobian: f64,
    pub heisenberg: f64,
    pub cayley_conjugation: f64,
    pub round_trip: f64,
    pub psi_level: f64,
    pub cayley_slash: f64,
    pub commuting_square: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            cocycle: 1e-10,
            delta_law: 1e-10,
            jacobian: 1e-6,
            heisenberg: 1e-12,
            cayley_conjugation: 1e-12,
            round_trip: 1e-12,
            psi_level: 1e-12,
            cayley_slash: 1e-12,
            commuting_square: 1e-10,
        }
    }
}

impl VerifyTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            cocycle: tol,
            delta_law: tol,
            jacobian: tol,
            heisenberg: tol,
            cayley_conjugation: tol,
            round_trip: tol,
            psi_level: tol,
            cayley_slash: tol,
            commuting_square: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyParams {
    pub n: usize,
    pub r: usize,
    pub triples: usize,
    pub points: usize,
    pub t_max: f64,
    pub weight: i64,
    pub suites: Vec<Suite>,
    pub tolerances: VerifyTolerances,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            n: 2,
            r: 2,
            triples: 200,
            points: 100,
            t_max: 1.5,
            weight: 3,
            suites: vec![Suite::Identity, Suite::Cayley],
            tolerances: VerifyTolerances::default(),
        }
    }
}

/// Source of the cusp function: explicit modes or a function spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionParams {
    pub n: usize,
    pub r: usize,
    pub k: i64,
    pub cusp: CuspData,
    #[serde(default)]
    pub modes: Option<Vec<ModeSpec>>,
    #[serde(default)]
    pub function: Option<SuperFunctionSpec>,
    pub window: [i64; 2],
    pub bases: Vec<Vec<Complex64>>,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
    #[serde(default = "default_fourier_tol")]
    pub tol: f64,
    #[serde(default)]
    pub liouville: Vec<LiouvilleParams>,
}

fn default_quad_points() -> usize {
    sbforms_core::fourier::DEFAULT_QUAD_POINTS
}

fn default_fourier_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiouvilleParams {
    pub m: f64,
    pub c: FunctionSpec,
    pub bound: f64,
    pub radii: Vec<f64>,
    /// Expected outcome; a mismatch fails the job.
    #[serde(default = "yes")]
    pub expect_pass: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatakeParams {
    pub n: usize,
    pub k: i64,
    /// Defaults to 0 for a given profile and to `|I|` of the modes.
    #[serde(default)]
    pub rho: Option<usize>,
    #[serde(default = "default_s_values")]
    pub s_values: Vec<Exponent>,
    #[serde(default)]
    pub profile: Option<GrowthProfile>,
    /// Modes of a single component `I`.
    #[serde(default)]
    pub modes: Option<Vec<ModeSpec>>,
    #[serde(default)]
    pub region: Option<Region>,
    #[serde(default)]
    pub x0: Option<f64>,
    #[serde(default = "default_doublings")]
    pub doublings: usize,
    #[serde(default = "default_stable_tol")]
    pub stable_tol: f64,
}

fn default_s_values() -> Vec<Exponent> {
    vec![Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity]
}

fn default_doublings() -> usize {
    4
}

fn default_stable_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureParams {
    pub n: usize,
    #[serde(default)]
    pub r: usize,
    /// A random ball member `k₁ a_t k₂` with `|t| ≤ t_max` is drawn when absent.
    #[serde(default)]
    pub element: Option<GroupElement>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    pub center: Vec<Complex64>,
    pub half_width: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_measure_tol")]
    pub tol: f64,
}

fn default_t_max() -> f64 {
    0.5
}

fn default_samples() -> usize {
    1_000_000
}

fn default_measure_tol() -> f64 {
    1e-3
}
