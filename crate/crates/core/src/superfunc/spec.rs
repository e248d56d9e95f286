//! JSON descriptions of component functions.
//!
//! ```json
//! {"kind": "fourier_mode", "m": -1.0, "coeff": [2.0, 0.0], "w2_exponents": [1], "odd_index": [1]}
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Component, SuperFunction};
use crate::domain::Realization;
use crate::error::{Error, Result};
use crate::grassmann::MultiIndex;
use crate::group::{cocycle_cayley, cocycle_cayley_inv, GroupElement};
use crate::linalg::powi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CayleySide {
    /// `j(R, z)`, defined on the ball.
    R,
    /// `j(R⁻¹, w)`, defined on the half plane.
    RInv,
}

/// A scalar function of a point in `ℂ^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: Complex64,
    },
    /// `coeff · Π p_i^{e_i}`.
    Monomial {
        coeff: Complex64,
        exponents: Vec<u32>,
    },
    /// `coeff · w₂^{e} · e^{2π m w₁}`.
    FourierMode {
        m: f64,
        coeff: Complex64,
        #[serde(default)]
        w2_exponents: Vec<u32>,
    },
    /// `j(g, p)^power` for a group element, or the Cayley cocycle.
    CocyclePower {
        power: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        element: Option<GroupElement>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cayley: Option<CayleySide>,
    },
}

impl FunctionSpec {
    /// Builds the evaluator for arguments of length `dim`.
    pub fn build(&self, dim: usize) -> Result<Component> {
        let bad = |m: String| Err(Error::FunctionSpec(m));
        match self.clone() {
            FunctionSpec::Constant { value } => Ok(Component::constant(value)),
            FunctionSpec::Monomial { coeff, exponents } => {
                if exponents.len() != dim {
                    return bad(format!("monomial has {} exponents for dimension {dim}", exponents.len()));
                }
                let desc = format!("{coeff}·p^{exponents:?}");
                Ok(Component::new(desc, move |p| Ok(coeff * monomial(&exponents, p))))
            }
            FunctionSpec::FourierMode { m, coeff, w2_exponents } => {
                if dim == 0 || w2_exponents.len() > dim - 1 {
                    return bad(format!("fourier mode with {} w2 exponents in dimension {dim}", w2_exponents.len()));
                }
                if !m.is_finite() {
                    return bad("non-finite frequency".into());
                }
                let desc = format!("{coeff}·w2^{w2_exponents:?}·exp(2π·{m}·w1)");
                Ok(Component::new(desc, move |p| {
                    Ok(coeff * monomial(&w2_exponents, &p[1..]) * (p[0] * (2.0 * PI * m)).exp())
                }))
            }
            FunctionSpec::CocyclePower { power, element, cayley } => match (element, cayley) {
                (Some(g), None) => {
                    if g.n() != dim {
                        return bad(format!("element of dimension {} for dimension {dim}", g.n()));
                    }
                    Ok(Component::new(format!("j(g,·)^{power}"), move |p| Ok(powi(g.cocycle(p)?, power))))
                }
                (None, Some(CayleySide::R)) => {
                    Ok(Component::new(format!("j(R,·)^{power}"), move |p| Ok(powi(cocycle_cayley(p)?, power))))
                }
                (None, Some(CayleySide::RInv)) => Ok(Component::new(format!("j(R⁻¹,·)^{power}"), move |p| {
                    Ok(powi(cocycle_cayley_inv(p)?, power))
                })),
                _ => bad("cocycle_power needs exactly one of `element` and `cayley`".into()),
            },
        }
    }
}

fn monomial(exponents: &[u32], p: &[Complex64]) -> Complex64 {
    exponents
        .iter()
        .zip(p)
        .fold(Complex64::new(1.0, 0.0), |acc, (&e, z)| acc * z.powu(e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    #[serde(flatten)]
    pub function: FunctionSpec,
    #[serde(default)]
    pub odd_index: MultiIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperFunctionSpec {
    pub n: usize,
    pub r: usize,
    pub weight: i64,
    pub domain: Realization,
    pub components: Vec<ComponentSpec>,
}

impl SuperFunctionSpec {
    /// Components sharing an odd index are summed.
    pub fn build(&self) -> Result<SuperFunction> {
        let mut f = SuperFunction::new(self.n, self.r, self.weight, self.domain)?;
        for c in &self.components {
            f.add_component(c.odd_index, c.function.build(self.n)?)?;
        }
        Ok(f)
    }
}
