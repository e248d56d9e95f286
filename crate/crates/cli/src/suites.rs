//! Seeded identity suites behind `sbforms verify`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sbforms_core::domain::{cayley_map, cayley_map_inv, delta, delta_h, psi_coords, Realization};
use sbforms_core::grassmann::MultiIndex;
use sbforms_core::group::{a_prime_t, a_t, heisenberg_mul, n_prime, CayleyMatrix};
use sbforms_core::linalg::max_abs_diff;
use sbforms_core::measure::jacobian_check;
use sbforms_core::sampling::{gaussian, random_ball_point, random_half_plane_member, random_half_plane_point, random_member};
use sbforms_core::superfunc::{Component, SuperFunction};
use sbforms_core::Result;

use crate::job::VerifyParams;

/// One named pass/fail line of a report, usually a worst residual over
/// `samples` evaluations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub samples: usize,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, tol: f64, samples: usize, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            tol,
            samples,
            passed,
        }
    }

    pub fn below(name: &str, value: f64, tol: f64, samples: usize) -> Self {
        Self::new(name, value, tol, samples, value < tol)
    }
}

/// Worst-case accumulator; NaN residuals poison the maximum.
struct Worst(f64);

impl Worst {
    fn push(&mut self, v: f64) {
        self.0 = if v.is_nan() { f64::INFINITY } else { self.0.max(v) };
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Cocycle law, Δ law, Jacobian determinant, Heisenberg rule and the
/// conjugated `a_t`, over `triples` random members.
pub fn identity_suite(p: &VerifyParams, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = &p.tolerances;
    let (mut cocycle, mut law, mut jac, mut heis) = (Worst(0.0), Worst(0.0), Worst(0.0), Worst(0.0));
    for _ in 0..p.triples {
        let g = random_member(p.n, p.r, p.t_max, &mut rng);
        let h = random_member(p.n, p.r, p.t_max, &mut rng);
        let z = random_ball_point(p.n, 0.95, &mut rng).into_vec();
        let w = random_ball_point(p.n, 0.95, &mut rng).into_vec();

        let lhs = g.mul(&h)?.cocycle(&z)?;
        let rhs = g.cocycle(&h.mobius(&z)?)? * h.cocycle(&z)?;
        cocycle.push((lhs - rhs).norm() / lhs.norm().max(1.0));

        let lhs = delta(&g.mobius(&z)?, &g.mobius(&w)?);
        let rhs = delta(&z, &w) * g.cocycle(&z)? * g.cocycle(&w)?.conj();
        law.push((lhs - rhs).norm());

        jac.push(jacobian_check(&g, &z)?.relative_error);

        if p.n >= 2 {
            let (l, m) = (gaussian(&mut rng).re, gaussian(&mut rng).re);
            let u: Vec<Complex64> = (1..p.n).map(|_| gaussian(&mut rng)).collect();
            let v: Vec<Complex64> = (1..p.n).map(|_| gaussian(&mut rng)).collect();
            let (lm, uv) = heisenberg_mul((l, &u), (m, &v));
            let prod = n_prime(l, &u, p.r).mul(&n_prime(m, &v, p.r))?;
            heis.push(max_abs_diff(prod.body(), n_prime(lm, &uv, p.r).body()));
        }
    }
    let cay = CayleyMatrix::new(p.n);
    let mut conj = Worst(0.0);
    for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let m = cay.matrix() * a_t(t, p.n, p.r).body() * cay.inverse();
        conj.push(max_abs_diff(&m, a_prime_t(t, p.n, p.r).body()));
    }
    let mut checks = vec![
        Check::below("cocycle_law", cocycle.0, tol.cocycle, p.triples),
        Check::below("delta_law", law.0, tol.delta_law, p.triples),
        Check::below("jacobian_determinant", jac.0, tol.jacobian, p.triples),
    ];
    if p.n >= 2 {
        checks.push(Check::below("heisenberg_rule", heis.0, tol.heisenberg, p.triples));
    }
    checks.push(Check::below("cayley_conjugates_a_t", conj.0, tol.cayley_conjugation, 5));
    Ok(checks)
}

/// A seeded ball function with a polynomial component on every odd index.
pub fn polynomial_function(n: usize, r: usize, k: i64, rng: &mut ChaCha8Rng) -> Result<SuperFunction> {
    let mut f = SuperFunction::new(n, r, k, Realization::Ball)?;
    for index in MultiIndex::all(r) {
        let (a, b, c) = (gaussian(rng), gaussian(rng), gaussian(rng));
        let last = n - 1;
        f.add_component(index, Component::new(format!("{a} + {b}·z1 + {c}·z{n}²"), move |z| Ok(a + b * z[0] + c * z[last] * z[last])))?;
    }
    Ok(f)
}

/// Cayley round trips, `Δ′∘Ψ = 2x`, `|_R ∘ |_{R⁻¹}` and the commuting square.
pub fn cayley_suite(p: &VerifyParams, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ff_ee00);
    let tol = &p.tolerances;
    let f = polynomial_function(p.n, p.r, p.weight, &mut rng)?;
    let fh = f.slash_cayley_inv()?;
    let fb = fh.slash_cayley()?;
    let (mut trip, mut level, mut slash, mut square) = (Worst(0.0), Worst(0.0), Worst(0.0), Worst(0.0));
    for _ in 0..p.points {
        let z = random_ball_point(p.n, 0.95, &mut rng).into_vec();
        trip.push(max_diff(&z, &cayley_map_inv(&cayley_map(&z)?)?));

        let x = 0.05 + 5.0 * gaussian(&mut rng).re.abs();
        let y = gaussian(&mut rng).re;
        let u: Vec<Complex64> = (1..p.n).map(|_| gaussian(&mut rng)).collect();
        let w = psi_coords(x, y, &u)?;
        level.push((delta_h(&w, &w).re - 2.0 * x).abs() / (2.0 * x).max(1.0));

        let direct = f.eval(&z)?;
        slash.push(fb.eval(&z)?.max_abs_diff(&direct) / (1.0 + direct.norm()));
        let wh = random_half_plane_point(p.n, 0.2, 4.0, &mut rng);
        let back = fh.slash_cayley()?.slash_cayley_inv()?.eval(wh.coords())?;
        let direct = fh.eval(wh.coords())?;
        slash.push(back.max_abs_diff(&direct) / (1.0 + direct.norm()));

        let g = random_half_plane_member(p.n, p.r, 0.8, &mut rng);
        let zb = cayley_map_inv(wh.coords())?;
        let lhs = fh.slash(&g)?.slash_cayley()?.eval(&zb)?;
        let rhs = fh.slash_cayley()?.slash(&g.switch_realization())?.eval(&zb)?;
        square.push(lhs.max_abs_diff(&rhs) / (1.0 + lhs.norm()));
    }
    Ok(vec![
        Check::below("cayley_round_trip", trip.0, tol.round_trip, p.points),
        Check::below("psi_level_set", level.0, tol.psi_level, p.points),
        Check::below("cayley_slash_inverse", slash.0, tol.cayley_slash, 2 * p.points),
        Check::below("commuting_square", square.0, tol.commuting_square, p.points),
    ])
}
