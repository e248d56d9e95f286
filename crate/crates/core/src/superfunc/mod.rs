//! Super holomorphic functions `f = Σ_I f_I ζ^I` as finite families of
//! component evaluators, with the weighted slash actions, the Cayley
//! transports `|_R`, `|_{R⁻¹}`, the lift to the group and the pointwise
//! amplitude entering every norm.
//!
//! Components are black-box closures; slashing composes them lazily, so a
//! cocycle pole only surfaces when the composed function is evaluated there.

mod spec;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::{cayley_map, cayley_map_inv, delta, delta_h, validate, BallPoint, Realization};
use crate::error::{Error, Result};
use crate::grassmann::{exterior_action, GrassmannVector, MultiIndex, MAX_RANK};
use crate::group::{cocycle_cayley, cocycle_cayley_inv, GroupElement};
use crate::linalg::powi;

pub use spec::{CayleySide, ComponentSpec, FunctionSpec, SuperFunctionSpec};

pub type Evaluator = Arc<dyn Fn(&[Complex64]) -> Result<Complex64> + Send + Sync>;

/// A pure complex-valued evaluator with a readable descriptor.
#[derive(Clone)]
pub struct Component {
    eval: Evaluator,
    descriptor: String,
}

impl Component {
    pub fn new<F>(descriptor: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            descriptor: descriptor.into(),
        }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::new(format!("{value}"), move |_| Ok(value))
    }

    pub fn eval(&self, p: &[Complex64]) -> Result<Complex64> {
        (self.eval)(p)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.eval)
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Component) -> Component {
        let (a, b) = (self.evaluator(), other.evaluator());
        Component::new(format!("{} + {}", self.descriptor, other.descriptor), move |p| {
            Ok(a(p)? + b(p)?)
        })
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Component({})", self.descriptor)
    }
}

#[derive(Clone, Debug)]
pub struct SuperFunction {
    n: usize,
    r: usize,
    weight: i64,
    realization: Realization,
    components: BTreeMap<MultiIndex, Component>,
}

impl SuperFunction {
    pub fn new(n: usize, r: usize, weight: i64, realization: Realization) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if r > MAX_RANK {
            return Err(Error::RankTooLarge(r));
        }
        Ok(Self {
            n,
            r,
            weight,
            realization,
            components: BTreeMap::new(),
        })
    }

    /// Adds `component · ζ^I`, summing with an existing `f_I`.
    pub fn with_component(mut self, index: MultiIndex, component: Component) -> Result<Self> {
        self.add_component(index, component)?;
        Ok(self)
    }

    pub fn add_component(&mut self, index: MultiIndex, component: Component) -> Result<()> {
        if index.max_index() > self.r {
            return Err(Error::IndexOutOfRange {
                index: index.max_index(),
                rank: self.r,
            });
        }
        let merged = match self.components.remove(&index) {
            Some(existing) => existing.plus(&component),
            None => component,
        };
        self.components.insert(index, merged);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn component(&self, index: MultiIndex) -> Option<&Component> {
        self.components.get(&index)
    }

    pub fn components(&self) -> impl Iterator<Item = (MultiIndex, &Component)> {
        self.components.iter().map(|(i, c)| (*i, c))
    }

    pub fn support(&self) -> Vec<MultiIndex> {
        self.components.keys().copied().collect()
    }

    /// Cardinalities `|I|` present in the support.
    pub fn degrees(&self) -> BTreeSet<usize> {
        self.components.keys().map(|i| i.len()).collect()
    }

    /// Coefficient vector `Σ f_I(p) ζ^I` at a point of the open domain.
    pub fn eval(&self, p: &[Complex64]) -> Result<GrassmannVector> {
        self.check_point(p)?;
        let mut out = GrassmannVector::zeros(self.r)?;
        for (index, c) in &self.components {
            out.set(*index, finite(c.eval(p)?)?)?;
        }
        Ok(out)
    }

    /// `f_I(p)` without domain validation; zero when `I` is not in the support.
    pub fn eval_component(&self, index: MultiIndex, p: &[Complex64]) -> Result<Complex64> {
        match self.components.get(&index) {
            Some(c) => finite(c.eval(p)?),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    fn check_point(&self, p: &[Complex64]) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
                context: "point dimension",
            });
        }
        validate(self.realization, p)
    }

    /// Keeps only the components of degree `rho`.
    pub fn degree_project(&self, rho: usize) -> Self {
        Self {
            components: self
                .components
                .iter()
                .filter(|(i, _)| i.len() == rho)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// `f|_g`, with components `h_J(p) = Σ_{|I|=|J|} f_I(g·p) j(g,p)^{k+|I|} det E[I;J]`.
    pub fn slash(&self, g: &GroupElement) -> Result<Self> {
        if g.realization() != self.realization {
            return Err(Error::RealizationMismatch {
                expected: self.realization,
                found: g.realization(),
            });
        }
        if g.n() != self.n || g.r() != self.r {
            return Err(Error::InvalidArgument(format!(
                "element of shape ({}, {}) acting on a function of shape ({}, {})",
                g.n(),
                g.r(),
                self.n,
                self.r
            )));
        }
        g.ensure_member()?;
        let g = Arc::new(g.clone());
        let k = self.weight;

        // J -> [(f_I, det E[I;J], k + |I|)]
        let mut terms: BTreeMap<MultiIndex, Vec<(Evaluator, Complex64, i64)>> = BTreeMap::new();
        let mut descriptors: BTreeMap<MultiIndex, Vec<String>> = BTreeMap::new();
        for (index, comp) in &self.components {
            let image = exterior_action(g.odd(), *index, self.r)?;
            for (j, minor) in image.terms() {
                terms
                    .entry(j)
                    .or_default()
                    .push((comp.evaluator(), minor, k + index.len() as i64));
                descriptors.entry(j).or_default().push(comp.descriptor.clone());
            }
        }

        let mut components = BTreeMap::new();
        for (j, parts) in terms {
            let g = Arc::clone(&g);
            let desc = format!("({})|g", descriptors[&j].join(", "));
            let comp = Component::new(desc, move |p| {
                let gp = g.mobius(p)?;
                let jac = g.cocycle(p)?;
                let mut acc = Complex64::new(0.0, 0.0);
                for (f, minor, power) in &parts {
                    acc += f(&gp)? * powi(jac, *power) * minor;
                }
                Ok(acc)
            });
            components.insert(j, comp);
        }
        Ok(Self {
            components,
            ..self.clone()
        })
    }

    /// `f|_R`: transports a function on the half plane to the ball.
    pub fn slash_cayley(&self) -> Result<Self> {
        self.expect_realization(Realization::HalfPlane)?;
        Ok(self.transport(Realization::Ball, "|R", |z| {
            Ok((cayley_map(z)?, cocycle_cayley(z)?))
        }))
    }

    /// `f|_{R⁻¹}`: transports a function on the ball to the half plane.
    pub fn slash_cayley_inv(&self) -> Result<Self> {
        self.expect_realization(Realization::Ball)?;
        Ok(self.transport(Realization::HalfPlane, "|R⁻¹", |w| {
            Ok((cayley_map_inv(w)?, cocycle_cayley_inv(w)?))
        }))
    }

    fn expect_realization(&self, expected: Realization) -> Result<()> {
        if self.realization == expected {
            Ok(())
        } else {
            Err(Error::RealizationMismatch {
                expected,
                found: self.realization,
            })
        }
    }

    fn transport<M>(&self, target: Realization, tag: &str, map: M) -> Self
    where
        M: Fn(&[Complex64]) -> Result<(Vec<Complex64>, Complex64)> + Send + Sync + Copy + 'static,
    {
        let components = self
            .components
            .iter()
            .map(|(index, comp)| {
                let f = comp.evaluator();
                let power = self.weight + index.len() as i64;
                let c = Component::new(format!("({}){tag}", comp.descriptor), move |p| {
                    let (q, jac) = map(p)?;
                    Ok(f(&q)? * powi(jac, power))
                });
                (*index, c)
            })
            .collect();
        Self {
            components,
            realization: target,
            ..self.clone()
        }
    }

    /// `f̃(g) = f|_g(0; η)` for a ball function and a ball element.
    pub fn lift(&self, g: &GroupElement) -> Result<GrassmannVector> {
        self.expect_realization(Realization::Ball)?;
        self.slash(g)?.eval(BallPoint::origin(self.n).coords())
    }

    /// `√(Σ_I |f_I(p)|² Δ(p,p)^{k+|I|})`, with `Δ′` on the half plane.
    pub fn amplitude(&self, p: &[Complex64]) -> Result<f64> {
        self.check_point(p)?;
        let base = match self.realization {
            Realization::Ball => delta(p, p).re,
            Realization::HalfPlane => delta_h(p, p).re,
        };
        let mut acc = 0.0;
        for (index, c) in &self.components {
            let v = finite(c.eval(p)?)?;
            acc += v.norm_sqr() * base.powi((self.weight + index.len() as i64) as i32);
        }
        Ok(acc.sqrt())
    }
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("component value {v}")))
    }
}
