//! Integrability near the cusp.
//!
//! In `Ψ` coordinates the weighted component `q_I Δ′^{(k+|I|)/2}` has
//! `L^s` mass `∫ |q_I∘Ψ|^s x^{(k+|I|)s/2 − (n+1)} dx dy du`. This module
//! integrates that numerically over boxes, decides finiteness of the
//! model tails `∫_{x0}^∞ e^{2πM₀xs} x^α dx` in closed form, and classifies
//! growth profiles against the weight threshold `2n − ρ`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::domain::{psi_coords, Region};
use crate::error::{Error, Result};
use crate::grassmann::MultiIndex;
use crate::quadrature::{log_panels, LegendreRule};

/// `2n − ρ`.
pub fn weight_threshold(n: usize, rho: usize) -> Result<i64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("the weight threshold needs n ≥ 2, got n = {n}")));
    }
    Ok(2 * n as i64 - rho as i64)
}

/// An exponent `s ∈ [1, ∞]`. Serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(s) if !(s >= 1.0) || !s.is_finite() => {
                Err(Error::InvalidArgument(format!("exponent {s} must lie in [1, ∞)")))
            }
            _ => Ok(self),
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Exponent::Infinity
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(s) => write!(f, "{s}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(s) => serializer.serialize_f64(*s),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let e = match Raw::deserialize(deserializer)? {
            Raw::Number(s) => Exponent::Finite(s),
            Raw::Text(t) if t == "inf" || t == "infinity" => Exponent::Infinity,
            Raw::Text(t) => return Err(serde::de::Error::custom(format!("unknown exponent {t:?}"))),
        };
        e.validate().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Stable,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partial {
    pub x_max: f64,
    pub value: f64,
}

/// For finite `s` the value is the integral itself, i.e. the `s`-th power
/// of the norm; for `s = ∞` it is the grid supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub partials: Vec<Partial>,
    pub relative_change: f64,
    pub diagnostic: Diagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormOptions {
    /// Number of times `x_max` is doubled after the base region.
    pub doublings: usize,
    /// Largest relative change across the last doubling still called stable.
    pub stable_tol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            doublings: 4,
            stable_tol: 1e-6,
        }
    }
}

/// `L^s` mass of `q` (the `I`-component, weight `k`) over `region`, with
/// the partial values obtained by doubling `x_max` `opts.doublings` times.
pub fn ls_norm<F>(q: F, n: usize, k: i64, index: MultiIndex, s: Exponent, region: &Region, opts: NormOptions) -> Result<NormReport>
where
    F: Fn(&[Complex64]) -> Result<Complex64> + Sync,
{
    region.validate(n)?;
    let s = s.validate()?;
    if opts.doublings == 0 {
        return Err(Error::InvalidArgument("at least one doubling is needed for a diagnostic".into()));
    }
    let fiber = fiber_nodes(region)?;
    let x_rule = LegendreRule::new(region.grid[0])?;
    let half_weight = (k + index.len() as i64) as f64 / 2.0;

    let mut segments = vec![log_panels(&x_rule, region.x_min, region.x_max)];
    let mut ends = vec![region.x_max];
    let mut x_hi = region.x_max;
    for _ in 0..opts.doublings {
        segments.push(log_panels(&x_rule, x_hi, 2.0 * x_hi));
        x_hi *= 2.0;
        ends.push(x_hi);
    }

    let slice = |x: f64| -> Result<f64> {
        match s {
            Exponent::Finite(s) => {
                let mut acc = 0.0;
                for (y, u, w) in &fiber {
                    acc += w * magnitude(&q, x, *y, u)?.powf(s);
                }
                Ok(acc * x.powf(half_weight * s - (n as f64 + 1.0)))
            }
            Exponent::Infinity => {
                let mut sup: f64 = 0.0;
                for (y, u, _) in &fiber {
                    sup = sup.max(magnitude(&q, x, *y, u)?);
                }
                Ok(sup * x.powf(half_weight))
            }
        }
    };

    let mut partials = Vec::with_capacity(segments.len());
    let mut running = 0.0;
    for (segment, x_max) in segments.iter().zip(ends) {
        let values: Vec<f64> = segment.par_iter().map(|(x, _)| slice(*x)).collect::<Result<_>>()?;
        for ((_, w), v) in segment.iter().zip(values) {
            running = match s {
                Exponent::Finite(_) => running + w * v,
                Exponent::Infinity => running.max(v),
            };
        }
        if !running.is_finite() {
            return Err(Error::NonFinite(format!("norm partial up to x = {x_max}")));
        }
        partials.push(Partial { x_max, value: running });
    }

    let last = partials[partials.len() - 1].value;
    let prev = partials[partials.len() - 2].value;
    let relative_change = if last == 0.0 { 0.0 } else { (last - prev).abs() / last.abs() };
    let diagnostic = if relative_change <= opts.stable_tol {
        Diagnostic::Stable
    } else {
        Diagnostic::Growing
    };
    Ok(NormReport {
        value: last,
        partials,
        relative_change,
        diagnostic,
    })
}

fn magnitude<F>(q: &F, x: f64, y: f64, u: &[Complex64]) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    let v = q(&psi_coords(x, y, u)?)?.norm();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("|q| at x = {x}, y = {y}")))
    }
}

/// Tensor Gauss–Legendre nodes of the `(y, u)` box.
fn fiber_nodes(region: &Region) -> Result<Vec<(f64, Vec<Complex64>, f64)>> {
    let y = LegendreRule::new(region.grid[1])?.panel(region.y_min, region.y_max);
    let mut out: Vec<(f64, Vec<Complex64>, f64)> = y.nodes.iter().zip(&y.weights).map(|(y, w)| (*y, vec![], *w)).collect();
    for (j, b) in region.u_box.iter().enumerate() {
        let re = LegendreRule::new(region.grid[2 + 2 * j])?.panel(b[0], b[1]);
        let im = LegendreRule::new(region.grid[3 + 2 * j])?.panel(b[2], b[3]);
        let mut next = Vec::with_capacity(out.len() * re.nodes.len() * im.nodes.len());
        for (y, u, w) in &out {
            for (a, wa) in re.nodes.iter().zip(&re.weights) {
                for (b, wb) in im.nodes.iter().zip(&im.weights) {
                    let mut u = u.clone();
                    u.push(Complex64::new(*a, *b));
                    next.push((*y, u, w * wa * wb));
                }
            }
        }
        out = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TailVerdict {
    Finite { bound: f64, alpha: f64 },
    Infinite { alpha: f64, reason: String },
}

impl TailVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailVerdict::Finite { .. })
    }

    pub fn bound(&self) -> Option<f64> {
        match self {
            TailVerdict::Finite { bound, .. } => Some(*bound),
            TailVerdict::Infinite { .. } => None,
        }
    }
}

/// `α = (k+ρ)s/2 − (n+1)` for finite `s`, `(k+ρ)/2` for `s = ∞`.
pub fn tail_exponent(k: i64, rho: usize, n: usize, s: Exponent) -> f64 {
    let half = (k + rho as i64) as f64 / 2.0;
    match s {
        Exponent::Finite(s) => half * s - (n as f64 + 1.0),
        Exponent::Infinity => half,
    }
}

/// Decides `∫_{x0}^∞ e^{2πM₀xs} x^α dx < ∞` (for `s = ∞`, boundedness of
/// `e^{2πM₀x} x^α` on `[x0, ∞)`) and bounds it when finite.
pub fn tail_dichotomy(m0: f64, k: i64, rho: usize, n: usize, s: Exponent, x0: f64) -> Result<TailVerdict> {
    if m0 > 0.0 {
        return Err(Error::PositiveFrequency(m0));
    }
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(Error::InvalidArgument(format!("x0 must be positive, got {x0}")));
    }
    let s = s.validate()?;
    let alpha = tail_exponent(k, rho, n, s);
    let verdict = match s {
        Exponent::Finite(s) => {
            if m0 < 0.0 {
                let beta = 2.0 * PI * -m0 * s;
                let bound = if alpha <= 0.0 {
                    x0.powf(alpha) * (-beta * x0).exp() / beta
                } else {
                    // Γ(α+1, βx0) / β^{α+1}
                    let a = alpha + 1.0;
                    (ln_gamma(a) + gamma_ur(a, beta * x0).ln() - a * beta.ln()).exp()
                };
                TailVerdict::Finite { bound, alpha }
            } else if alpha < -1.0 {
                TailVerdict::Finite {
                    bound: x0.powf(alpha + 1.0) / (-alpha - 1.0),
                    alpha,
                }
            } else {
                TailVerdict::Infinite {
                    alpha,
                    reason: format!("constant mode against x^{alpha} with α ≥ −1"),
                }
            }
        }
        Exponent::Infinity => {
            if m0 < 0.0 {
                let beta = 2.0 * PI * -m0;
                let peak = alpha / beta;
                let bound = if alpha > 0.0 && peak > x0 {
                    (alpha * (peak.ln() - 1.0)).exp()
                } else {
                    x0.powf(alpha) * (-beta * x0).exp()
                };
                TailVerdict::Finite { bound, alpha }
            } else if alpha <= 0.0 {
                TailVerdict::Finite {
                    bound: x0.powf(alpha),
                    alpha,
                }
            } else {
                TailVerdict::Infinite {
                    alpha,
                    reason: format!("constant mode against unbounded x^{alpha}"),
                }
            }
        }
    };
    Ok(verdict)
}

/// Growth data of one component: `|q(w)| ≤ C e^{2πM₀x}` for `x ≥ x0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthProfile {
    /// Largest strictly negative frequency; `None` when there is none.
    pub m0: Option<f64>,
    pub has_positive_frequency: bool,
    pub has_constant_term: bool,
    pub c_bound: f64,
}

impl GrowthProfile {
    /// From `(m, sup_u |c_m(u)|)` pairs; `C = Σ_{m<0} sup|c_m| e^{2π(m−M₀)x0}`.
    pub fn from_modes(modes: &[(f64, f64)], x0: f64) -> Self {
        let tol = crate::fourier::ZERO_FREQUENCY_TOL;
        let live = || modes.iter().filter(|(_, c)| *c > 0.0);
        let m0 = live().map(|(m, _)| *m).filter(|m| *m < -tol).reduce(f64::max);
        let c_bound = match m0 {
            Some(m0) => live()
                .filter(|(m, _)| *m < -tol)
                .map(|(m, c)| c * (2.0 * PI * (m - m0) * x0).exp())
                .sum(),
            None => 0.0,
        };
        Self {
            m0,
            has_positive_frequency: live().any(|(m, _)| *m > tol),
            has_constant_term: live().any(|(m, _)| m.abs() <= tol),
            c_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierVerdict {
    CuspLike,
    ConstantTermObstruction,
    KoecherViolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: ClassifierVerdict,
    pub threshold: i64,
    pub s_values: Vec<Exponent>,
    /// Tail bounds `C^s · bound` per exponent, for cusp-like profiles.
    pub bounds: Vec<Option<f64>>,
}

/// Applies the weight-threshold dichotomy. Cusp-like verdicts carry tail
/// bounds for `s ∈ {1, 2, ∞}` and the requested `s`.
pub fn classify(profile: &GrowthProfile, n: usize, k: i64, rho: usize, s: Exponent, x0: f64) -> Result<Classification> {
    let threshold = weight_threshold(n, rho)?;
    let s = s.validate()?;
    let mut s_values = vec![Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity];
    if !s_values.contains(&s) {
        s_values.insert(s_values.len() - 1, s);
    }
    let none = vec![None; s_values.len()];
    if profile.has_positive_frequency {
        return Ok(Classification {
            verdict: ClassifierVerdict::KoecherViolation,
            threshold,
            s_values,
            bounds: none,
        });
    }
    if profile.has_constant_term {
        if k < threshold {
            return Err(Error::BelowThreshold { k, threshold });
        }
        return Ok(Classification {
            verdict: ClassifierVerdict::ConstantTermObstruction,
            threshold,
            s_values,
            bounds: none,
        });
    }
    let bounds = s_values
        .iter()
        .map(|&e| match profile.m0 {
            None => Ok(Some(0.0)),
            Some(m0) => {
                let t = tail_dichotomy(m0, k, rho, n, e, x0)?;
                let scale = match e {
                    Exponent::Finite(s) => profile.c_bound.powf(s),
                    Exponent::Infinity => profile.c_bound,
                };
                Ok(t.bound().map(|b| scale * b))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification {
        verdict: ClassifierVerdict::CuspLike,
        threshold,
        s_values,
        bounds,
    })
}

/// Smallest sampled `x` from which on `|q(Ψ(x, 0, u)) − c0| ≤ |c0|/2` at
/// every later sample; `xs` must be ascending.
pub fn constant_term_onset<F>(q: F, c0: Complex64, u: &[Complex64], xs: &[f64]) -> Result<Option<f64>>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    let mut onset = None;
    for &x in xs.iter().rev() {
        if (q(&psi_coords(x, 0.0, u)?)? - c0).norm() <= 0.5 * c0.norm() {
            onset = Some(x);
        } else {
            break;
        }
    }
    Ok(onset)
}
