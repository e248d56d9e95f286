//! The unit ball `B`, its unbounded realization `H`, Jordan triple
//! determinants, invariant densities, the Cayley point map and the `Ψ`
//! coordinates used for integration near a cusp.
//!
//! Points are validated strictly: the open domains are accepted, boundary
//! points get [`Error::BoundaryPoint`] and exterior points
//! [`Error::OutsideDomain`].

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_dot, norm_sqr};
use crate::quadrature::LegendreRule;

/// Relative width of the band treated as the boundary.
pub const BOUNDARY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Realization {
    Ball,
    HalfPlane,
}

/// `Δ(z, w) = 1 − w* z`.
pub fn delta(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    Complex64::new(1.0, 0.0) - herm_dot(w, z)
}

/// `Δ′(z, w) = z₁ + conj(w₁) − w₂* z₂`.
pub fn delta_h(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z[0] + w[0].conj() - herm_dot(&w[1..], &z[1..])
}

/// Checks that `p` lies in the open domain of `realization`.
pub fn validate(realization: Realization, p: &[Complex64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("empty point".into()));
    }
    if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("point coordinates".into()));
    }
    let (gap, scale) = match realization {
        Realization::Ball => (1.0 - norm_sqr(p), 1.0),
        Realization::HalfPlane => (delta_h(p, p).re, 1.0 + 2.0 * p[0].re.abs() + norm_sqr(&p[1..])),
    };
    if gap > BOUNDARY_TOL * scale {
        Ok(())
    } else if gap >= -BOUNDARY_TOL * scale {
        Err(Error::BoundaryPoint(realization))
    } else {
        Err(Error::OutsideDomain(realization))
    }
}

pub fn in_domain(realization: Realization, p: &[Complex64]) -> bool {
    validate(realization, p).is_ok()
}

/// Point of the ball, `z* z < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct BallPoint(Vec<Complex64>);

/// Point of the half plane, `Re w₁ > ½ w₂* w₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct HalfPlanePoint(Vec<Complex64>);

impl BallPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        validate(Realization::Ball, &z)?;
        Ok(Self(z))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    /// `Δ(z, z)^{−(n+1)}`.
    pub fn invariant_density(&self) -> f64 {
        delta(&self.0, &self.0).re.powi(-(self.0.len() as i32 + 1))
    }
}

impl HalfPlanePoint {
    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        validate(Realization::HalfPlane, &w)?;
        Ok(Self(w))
    }

    /// The base point `e₁`, image of the ball's centre.
    pub fn e1(n: usize) -> Self {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        w[0] = Complex64::new(1.0, 0.0);
        Self(w)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn w1(&self) -> Complex64 {
        self.0[0]
    }

    pub fn w2(&self) -> &[Complex64] {
        &self.0[1..]
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    /// `Δ′(w, w)^{−(n+1)}`.
    pub fn invariant_density(&self) -> f64 {
        delta_h(&self.0, &self.0).re.powi(-(self.0.len() as i32 + 1))
    }
}

impl TryFrom<Vec<Complex64>> for BallPoint {
    type Error = Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl TryFrom<Vec<Complex64>> for HalfPlanePoint {
    type Error = Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BallPoint> for Vec<Complex64> {
    fn from(p: BallPoint) -> Self {
        p.0
    }
}

impl From<HalfPlanePoint> for Vec<Complex64> {
    fn from(p: HalfPlanePoint) -> Self {
        p.0
    }
}

/// Invariant volume density at a raw point of either realization.
pub fn invariant_density(realization: Realization, p: &[Complex64]) -> Result<f64> {
    validate(realization, p)?;
    let d = match realization {
        Realization::Ball => delta(p, p).re,
        Realization::HalfPlane => delta_h(p, p).re,
    };
    Ok(d.powi(-(p.len() as i32 + 1)))
}

/// `z ↦ ((1+z₁)/(1−z₁), √2 z₂/(1−z₁))` on raw coordinates.
pub fn cayley_map(z: &[Complex64]) -> Result<Vec<Complex64>> {
    let denom = Complex64::new(1.0, 0.0) - z[0];
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::CayleyPole);
    }
    let mut w = Vec::with_capacity(z.len());
    w.push((Complex64::new(1.0, 0.0) + z[0]) / denom);
    w.extend(z[1..].iter().map(|zi| zi * SQRT_2 / denom));
    Ok(w)
}

/// `w ↦ ((w₁−1)/(w₁+1), √2 w₂/(w₁+1))`, inverse of [`cayley_map`].
pub fn cayley_map_inv(w: &[Complex64]) -> Result<Vec<Complex64>> {
    let denom = Complex64::new(1.0, 0.0) + w[0];
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::CayleyPole);
    }
    let mut z = Vec::with_capacity(w.len());
    z.push((w[0] - Complex64::new(1.0, 0.0)) / denom);
    z.extend(w[1..].iter().map(|wi| wi * SQRT_2 / denom));
    Ok(z)
}

pub fn cayley_point(z: &BallPoint) -> Result<HalfPlanePoint> {
    HalfPlanePoint::new(cayley_map(z.coords())?)
}

pub fn cayley_point_inv(w: &HalfPlanePoint) -> Result<BallPoint> {
    BallPoint::new(cayley_map_inv(w.coords())?)
}

/// `Ψ(x, iy, u) = (x + ½u*u + iy, u)`; `Δ′(Ψ, Ψ) = 2x`.
pub fn psi(x: f64, y: f64, u: &[Complex64]) -> Result<HalfPlanePoint> {
    psi_coords(x, y, u).map(HalfPlanePoint)
}

/// [`psi`] without the domain round-trip, for quadrature loops.
pub fn psi_coords(x: f64, y: f64, u: &[Complex64]) -> Result<Vec<Complex64>> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("psi requires x > 0, got {x}")));
    }
    let mut w = Vec::with_capacity(u.len() + 1);
    w.push(Complex64::new(x + 0.5 * norm_sqr(u), y));
    w.extend_from_slice(u);
    Ok(w)
}

pub fn psi_inv(w: &HalfPlanePoint) -> (f64, f64, Vec<Complex64>) {
    let u = w.w2().to_vec();
    (w.w1().re - 0.5 * norm_sqr(&u), w.w1().im, u)
}

/// Integration box in `Ψ` coordinates.
///
/// `grid` holds per-axis node counts: `[x (per factor-2 panel), y, Re u₁,
/// Im u₁, …]`, so its length is `2 + 2(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub u_box: Vec<[f64; 4]>,
    pub grid: Vec<usize>,
}

impl Region {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRegion(m));
        if !(self.x_min > 0.0) || !self.x_min.is_finite() {
            return bad(format!("x_min must be positive, got {}", self.x_min));
        }
        if !(self.x_max > self.x_min) || !self.x_max.is_finite() {
            return bad(format!("x_max {} must exceed x_min {}", self.x_max, self.x_min));
        }
        if !(self.y_max > self.y_min) {
            return bad("empty y range".into());
        }
        if self.u_box.len() + 1 != n {
            return bad(format!("u_box has {} entries, expected {}", self.u_box.len(), n - 1));
        }
        for b in &self.u_box {
            if !(b[1] > b[0]) || !(b[3] > b[2]) {
                return bad(format!("degenerate u box {b:?}"));
            }
        }
        if self.grid.len() != 2 * n {
            return bad(format!("grid has {} axes, expected {}", self.grid.len(), 2 * n));
        }
        if self.grid.iter().any(|&g| g < 2) {
            return bad("grid resolutions must be at least 2".into());
        }
        Ok(())
    }

    /// Lebesgue volume of the `(y, u)` cross-section.
    pub fn fiber_volume(&self) -> f64 {
        self.u_box
            .iter()
            .fold(self.y_max - self.y_min, |acc, b| acc * (b[1] - b[0]) * (b[3] - b[2]))
    }

    pub fn with_x_max(&self, x_max: f64) -> Self {
        Self {
            x_max,
            ..self.clone()
        }
    }
}

/// `∫_{|z|<radius} Δ(z,z)^λ dV_Leb` in `ℂⁿ`, reduced to one radial variable.
///
/// With `s = 1 − |z|²` the integral is `πⁿ/(n−1)! ∫_{1−radius²}^1 s^λ
/// (1−s)^{n−1} ds`, integrated on panels in `log s`.
pub fn ball_power_integral(n: usize, lambda: f64, radius: f64, nodes: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::InvalidArgument(format!("radius {radius} must lie in [0, 1)")));
    }
    let rule = LegendreRule::new(nodes)?;
    let s_min = 1.0 - radius * radius;
    if s_min >= 1.0 {
        return Ok(0.0);
    }
    let pts = crate::quadrature::log_panels(&rule, s_min, 1.0);
    let radial: f64 = pts
        .iter()
        .map(|(s, w)| w * s.powf(lambda) * (1.0 - s).powi(n as i32 - 1))
        .sum();
    let factorial: f64 = (1..n).map(|k| k as f64).product();
    Ok(std::f64::consts::PI.powi(n as i32) / factorial * radial)
}
