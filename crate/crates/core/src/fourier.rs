//! Fourier analysis at the cusp of `H`.
//!
//! A component `q_I` invariant under the cusp generator satisfies
//! `q_I(w) = q_I(w + iλ₀e₁) e^{2πi(tr_I D + (k+|I|)χ)}`, so it expands in
//! `c_{I,m}(w₂) e^{2πm w₁}` with `m` on the twisted lattice
//! `(ℤ − tr_I D − (k+|I|)χ)/λ₀`. Coefficients are extracted with the
//! uniform rule over one period, which is exact on finite mode sums whose
//! lattice indices differ by less than the number of nodes.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{HalfPlanePoint, Realization};
use crate::error::{Error, Result};
use crate::grassmann::MultiIndex;
use crate::group::{central_with_scalar, n_prime, GroupElement};
use crate::linalg::CMatrix;
use crate::superfunc::{Component, FunctionSpec, SuperFunction};

pub const DEFAULT_QUAD_POINTS: usize = 256;
pub const MIN_QUAD_POINTS: usize = 8;
/// Frequencies closer than this to 0 count as the constant term.
pub const ZERO_FREQUENCY_TOL: f64 = 1e-12;
/// Lattice membership tolerance.
pub const LATTICE_TOL: f64 = 1e-12;

/// Period `λ₀`, phase exponent `χ` and the diagonal of `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "CuspDataJson", into = "CuspDataJson")]
pub struct CuspData {
    lambda0: f64,
    chi: f64,
    d: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CuspDataJson {
    lambda0: f64,
    chi: f64,
    d: Vec<f64>,
}

impl TryFrom<CuspDataJson> for CuspData {
    type Error = Error;
    fn try_from(j: CuspDataJson) -> Result<Self> {
        CuspData::new(j.lambda0, j.chi, j.d)
    }
}

impl From<CuspData> for CuspDataJson {
    fn from(c: CuspData) -> Self {
        CuspDataJson {
            lambda0: c.lambda0,
            chi: c.chi,
            d: c.d,
        }
    }
}

impl CuspData {
    pub fn new(lambda0: f64, chi: f64, d: Vec<f64>) -> Result<Self> {
        if lambda0 == 0.0 || !lambda0.is_finite() {
            return Err(Error::InvalidArgument(format!("period must be finite and nonzero, got {lambda0}")));
        }
        if !chi.is_finite() || d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("cusp data".into()));
        }
        if d.len() > crate::grassmann::MAX_RANK {
            return Err(Error::RankTooLarge(d.len()));
        }
        Ok(Self { lambda0, chi, d })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn r(&self) -> usize {
        self.d.len()
    }

    /// `Σ_{j∈I} d_j`.
    pub fn tr(&self, index: MultiIndex) -> Result<f64> {
        if index.max_index() > self.d.len() {
            return Err(Error::IndexOutOfRange {
                index: index.max_index(),
                rank: self.d.len(),
            });
        }
        Ok(index.positions().map(|p| self.d[p]).sum())
    }

    /// `tr_I D + (k+|I|)χ`.
    pub fn twist(&self, index: MultiIndex, k: i64) -> Result<f64> {
        Ok(self.tr(index)? + (k + index.len() as i64) as f64 * self.chi)
    }

    /// Whether the twist is an integer, so that `m = 0` is on the lattice.
    pub fn is_untwisted(&self, index: MultiIndex, k: i64) -> Result<bool> {
        let t = self.twist(index, k)?;
        Ok((t - t.round()).abs() <= LATTICE_TOL)
    }

    /// `(j − tr_I D − (k+|I|)χ)/λ₀` for `j` in `window`, ascending.
    pub fn frequency_lattice(&self, index: MultiIndex, k: i64, window: RangeInclusive<i64>) -> Result<Vec<f64>> {
        Ok(self.lattice_points(index, k, window)?.into_iter().map(|(_, m)| m).collect())
    }

    /// Lattice frequencies paired with their integer labels, ascending in `m`.
    pub fn lattice_points(&self, index: MultiIndex, k: i64, window: RangeInclusive<i64>) -> Result<Vec<(i64, f64)>> {
        let t = self.twist(index, k)?;
        let mut pts: Vec<(i64, f64)> = window.map(|j| (j, (j as f64 - t) / self.lambda0)).collect();
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        Ok(pts)
    }

    /// The integer label of `m`, if `m` lies on the lattice.
    pub fn lattice_label(&self, index: MultiIndex, k: i64, m: f64) -> Result<Option<i64>> {
        let j = m * self.lambda0 + self.twist(index, k)?;
        let label = j.round();
        Ok(((j - label).abs() <= LATTICE_TOL * (1.0 + j.abs())).then_some(label as i64))
    }

    /// The half-plane element `n′_{λ₀,0} · (ε1, exp(2πiD))` with
    /// `ε = e^{−2πiχ}`; a member only when `ε^{n+1} = det E`.
    pub fn generator(&self, n: usize) -> Result<GroupElement> {
        let r = self.d.len();
        let e = CMatrix::from_fn(r, r, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 2.0 * PI * self.d[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let eps = Complex64::from_polar(1.0, -2.0 * PI * self.chi);
        let z = central_with_scalar(eps, e, n, Realization::HalfPlane)?;
        z.ensure_member()?;
        n_prime(self.lambda0, &vec![Complex64::new(0.0, 0.0); n - 1], r).mul(&z)
    }
}

/// `c(w₂) e^{2πm w₁} ζ^I`.
#[derive(Debug, Clone)]
pub struct FourierMode {
    pub index: MultiIndex,
    pub m: f64,
    pub c: Component,
}

impl FourierMode {
    pub fn new(index: MultiIndex, m: f64, c: Component) -> Self {
        Self { index, m, c }
    }

    pub fn is_on_lattice(&self, cusp: &CuspData, k: i64) -> Result<bool> {
        Ok(cusp.lattice_label(self.index, k, self.m)?.is_some())
    }

    /// The mode as a function on `H`.
    pub fn component(&self) -> Component {
        let c = self.c.evaluator();
        let m = self.m;
        Component::new(format!("({})·exp(2π·{m}·w1)", self.c.descriptor()), move |w| {
            Ok(c(&w[1..])? * (w[0] * (2.0 * PI * m)).exp())
        })
    }
}

/// JSON form of a mode; `c` is a function of `w₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    #[serde(rename = "I", default)]
    pub index: MultiIndex,
    pub m: f64,
    pub c: FunctionSpec,
}

impl ModeSpec {
    pub fn build(&self, n: usize) -> Result<FourierMode> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(FourierMode::new(self.index, self.m, self.c.build(n - 1)?))
    }
}

/// Sums the modes per odd index into a half-plane function of weight `k`.
pub fn synthesize(n: usize, r: usize, k: i64, modes: &[FourierMode]) -> Result<SuperFunction> {
    let mut f = SuperFunction::new(n, r, k, Realization::HalfPlane)?;
    for mode in modes {
        f.add_component(mode.index, mode.component())?;
    }
    Ok(f)
}

/// `(1/N) Σ_j q(base + iλ_j e₁) e^{−2πimλ_j}` with `λ_j = jλ₀/N`,
/// approximating `c_m(base₂) e^{2πm base₁}`.
pub fn fourier_coefficient<F>(q: F, m: f64, base: &HalfPlanePoint, cusp: &CuspData, quad_points: usize) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    if quad_points < MIN_QUAD_POINTS {
        return Err(Error::QuadratureBudget {
            points: quad_points,
            minimum: MIN_QUAD_POINTS,
        });
    }
    let mut w = base.coords().to_vec();
    let w1 = w[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..quad_points {
        let lambda = cusp.lambda0 * j as f64 / quad_points as f64;
        w[0] = w1 + Complex64::new(0.0, lambda);
        let v = q(&w)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("integrand at λ = {lambda}")));
        }
        acc += v * Complex64::from_polar(1.0, -2.0 * PI * m * lambda);
    }
    Ok(acc / quad_points as f64)
}

/// One extracted coefficient, `value = c_{I,m}(base₂) e^{2πm base₁}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    #[serde(rename = "I")]
    pub index: MultiIndex,
    pub m: f64,
    pub label: i64,
    pub base: Vec<Complex64>,
    pub value: Complex64,
}

impl CoefficientEntry {
    /// `c_{I,m}(base₂)`, the value with the exponential in `w₁` removed.
    pub fn coefficient(&self) -> Complex64 {
        self.value * (self.base[0] * (-2.0 * PI * self.m)).exp()
    }
}

/// Coefficients of every support component of `q` at every lattice slot
/// of `window` and every base point, in (I, m, base) order.
pub fn expand(
    q: &SuperFunction,
    cusp: &CuspData,
    window: RangeInclusive<i64>,
    bases: &[HalfPlanePoint],
    quad_points: usize,
) -> Result<Vec<CoefficientEntry>> {
    check_cusp_function(q, cusp, bases)?;
    let mut tasks = Vec::new();
    for index in q.support() {
        for (label, m) in cusp.lattice_points(index, q.weight(), window.clone())? {
            for base in bases {
                tasks.push((index, label, m, base));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(index, label, m, base)| {
            let value = fourier_coefficient(|w| q.eval_component(index, w), m, base, cusp, quad_points)?;
            Ok(CoefficientEntry {
                index,
                m,
                label,
                base: base.coords().to_vec(),
                value,
            })
        })
        .collect()
}

fn check_cusp_function(q: &SuperFunction, cusp: &CuspData, bases: &[HalfPlanePoint]) -> Result<()> {
    if q.realization() != Realization::HalfPlane {
        return Err(Error::RealizationMismatch {
            expected: Realization::HalfPlane,
            found: q.realization(),
        });
    }
    if cusp.r() != q.r() {
        return Err(Error::DimensionMismatch {
            expected: q.r(),
            found: cusp.r(),
            context: "cusp twist diagonal",
        });
    }
    if let Some(b) = bases.iter().find(|b| b.dim() != q.n()) {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            found: b.dim(),
            context: "base point",
        });
    }
    if bases.is_empty() {
        return Err(Error::InvalidArgument("no base points".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveMode {
    #[serde(rename = "I")]
    pub index: MultiIndex,
    pub m: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTermCheck {
    #[serde(rename = "I")]
    pub index: MultiIndex,
    /// `max_b |c_{I,0}(b) − c_{I,0}(b₀)|` over the base points.
    pub spread: f64,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoecherReport {
    pub passed: bool,
    pub tol: f64,
    /// Largest coefficient magnitude over positive lattice frequencies.
    pub max_positive: f64,
    /// Positive frequencies whose coefficient reaches `tol` somewhere.
    pub offending: Vec<PositiveMode>,
    pub constant_terms: Vec<ConstantTermCheck>,
}

/// Checks that every positive-frequency coefficient vanishes, and that the
/// constant terms of untwisted components do not depend on `w₂`.
pub fn koecher_check(
    q: &SuperFunction,
    cusp: &CuspData,
    window: RangeInclusive<i64>,
    bases: &[HalfPlanePoint],
    tol: f64,
    quad_points: usize,
) -> Result<KoecherReport> {
    let entries = expand(q, cusp, window, bases, quad_points)?;
    let mut max_positive: f64 = 0.0;
    let mut offending: Vec<PositiveMode> = Vec::new();
    let mut constant_terms = Vec::new();
    for e in &entries {
        if e.m > ZERO_FREQUENCY_TOL {
            let mag = e.value.norm();
            max_positive = max_positive.max(mag);
            if mag >= tol {
                match offending.iter_mut().find(|o| o.index == e.index && o.m == e.m) {
                    Some(o) => o.magnitude = o.magnitude.max(mag),
                    None => offending.push(PositiveMode {
                        index: e.index,
                        m: e.m,
                        magnitude: mag,
                    }),
                }
            }
        }
    }
    for index in q.support() {
        if !cusp.is_untwisted(index, q.weight())? {
            continue;
        }
        let zeros: Vec<Complex64> = entries
            .iter()
            .filter(|e| e.index == index && e.m.abs() <= ZERO_FREQUENCY_TOL)
            .map(|e| e.coefficient())
            .collect();
        if let Some(first) = zeros.first() {
            let spread = zeros.iter().map(|c| (c - first).norm()).fold(0.0, f64::max);
            constant_terms.push(ConstantTermCheck {
                index,
                spread,
                constant: spread < tol,
            });
        }
    }
    let passed = offending.is_empty() && constant_terms.iter().all(|c| c.constant);
    Ok(KoecherReport {
        passed,
        tol,
        max_positive,
        offending,
        constant_terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleSample {
    pub radius: f64,
    pub u: Vec<Complex64>,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub passed: bool,
    pub samples: Vec<LiouvilleSample>,
}

/// Samples `|c(u)| ≤ bound · e^{−πm u*u}` on spheres of the given radii
/// in `ℂ^dim`, along the real and imaginary axes and the diagonal.
pub fn liouville_bound_check<F>(c: F, dim: usize, m: f64, bound: f64, radii: &[f64]) -> Result<LiouvilleReport>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    if dim == 0 {
        return Err(Error::InvalidArgument("the Gaussian bound needs n ≥ 2".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    let mut directions = Vec::with_capacity(2 * dim + 1);
    for k in 0..dim {
        for unit in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[k] = unit;
            directions.push(v);
        }
    }
    let s = 1.0 / (2.0 * dim as f64).sqrt();
    directions.push(vec![Complex64::new(s, s); dim]);

    let mut samples = Vec::new();
    for &radius in radii {
        for dir in &directions {
            let u: Vec<Complex64> = dir.iter().map(|x| x * radius).collect();
            let value = c(&u)?.norm();
            let limit = bound * (-PI * m * radius * radius).exp();
            samples.push(LiouvilleSample { radius, u, value, limit });
        }
    }
    let passed = samples.iter().all(|s| s.value <= s.limit * (1.0 + 1e-12));
    Ok(LiouvilleReport { passed, samples })
}
