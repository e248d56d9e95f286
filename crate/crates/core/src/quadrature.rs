//! Deterministic quadrature rules.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights mapped to an interval.
#[derive(Debug, Clone)]
pub struct Panel {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Reference rule on `[-1, 1]`, reusable across panels.
#[derive(Debug, Clone)]
pub struct LegendreRule {
    pairs: Vec<(f64, f64)>,
}

impl LegendreRule {
    pub fn new(points: usize) -> Result<Self> {
        let rule = GaussLegendre::new(points).map_err(|_| Error::QuadratureBudget {
            points,
            minimum: 2,
        })?;
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        // ascending node order keeps sums reproducible
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn panel(&self, a: f64, b: f64) -> Panel {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Panel {
            nodes: self.pairs.iter().map(|(x, _)| mid + half * x).collect(),
            weights: self.pairs.iter().map(|(_, w)| half * w).collect(),
        }
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let p = self.panel(a, b);
        p.nodes.iter().zip(&p.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Composite rule on `[a, b]` in the variable `log x`, one panel per factor-2
/// stretch. Returns `(x, weight)` pairs such that `Σ w f(x) ≈ ∫ f(x) dx`.
pub fn log_panels(rule: &LegendreRule, a: f64, b: f64) -> Vec<(f64, f64)> {
    debug_assert!(a > 0.0 && b > a);
    let (la, lb) = (a.ln(), b.ln());
    let panels = ((lb - la) / std::f64::consts::LN_2).ceil().max(1.0) as usize;
    let step = (lb - la) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = la + step * p as f64;
        let hi = if p + 1 == panels { lb } else { lo + step };
        let panel = rule.panel(lo, hi);
        for (s, w) in panel.nodes.iter().zip(&panel.weights) {
            let x = s.exp();
            out.push((x, w * x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let rule = LegendreRule::new(4).unwrap();
        let v = rule.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((v - 32.0).abs() < 1e-12);
        assert!(LegendreRule::new(1).is_err());
    }

    #[test]
    fn log_panels_integrate_power_tails() {
        let rule = LegendreRule::new(16).unwrap();
        let pts = log_panels(&rule, 1.0, 1e6);
        let v: f64 = pts.iter().map(|(x, w)| w * x.powf(-1.5)).sum();
        let exact = 2.0 * (1.0 - 1e-3);
        assert!((v - exact).abs() < 1e-12);
        let h: f64 = pts.iter().map(|(x, w)| w / x).sum();
        assert!((h - 1e6f64.ln()).abs() < 1e-10);
    }
}
