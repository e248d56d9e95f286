//! The group `sS(U(n,1) × U(r))`, its conjugate by the partial Cayley matrix,
//! and their fractional linear actions.
//!
//! Elements are dense complex blocks: the even part `g′ = [[A, b], [c, d]]` of
//! size `n+1` and the odd part `E` of size `r`. A [`Realization`] tag records
//! whether the element acts on the ball or on the half plane; half-plane
//! elements are members when their conjugate back to the ball is.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{delta_h, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{det, identity, max_abs_diff, norm_sqr, CMatrix};

pub use crate::domain::Realization;

/// Default residual tolerance for membership and domain checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    n: usize,
    r: usize,
    body: CMatrix,
    odd: CMatrix,
    realization: Realization,
    tol: f64,
}

/// Residuals of the three defining conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// `max |g′* J g′ − J|` (after conjugating back for half-plane elements).
    pub form_residual: f64,
    /// `max |E* E − 1|`.
    pub unitarity_residual: f64,
    /// `|det g′ − det E|`.
    pub det_residual: f64,
    pub tol: f64,
    pub member: bool,
}

impl GroupElement {
    pub fn new(body: CMatrix, odd: CMatrix, realization: Realization) -> Result<Self> {
        if body.nrows() < 2 || body.nrows() != body.ncols() {
            return Err(Error::InvalidArgument(format!(
                "even block must be square of size n+1 ≥ 2, got {}×{}",
                body.nrows(),
                body.ncols()
            )));
        }
        if odd.nrows() != odd.ncols() {
            return Err(Error::DimensionMismatch {
                expected: odd.nrows(),
                found: odd.ncols(),
                context: "odd block must be square",
            });
        }
        if odd.nrows() > crate::grassmann::MAX_RANK {
            return Err(Error::RankTooLarge(odd.nrows()));
        }
        Ok(Self {
            n: body.nrows() - 1,
            r: odd.nrows(),
            body,
            odd,
            realization,
            tol: DEFAULT_TOL,
        })
    }

    /// Assembles `g′` from `A` (n×n), `b` (n), `c` (n), `d`.
    pub fn from_blocks(
        a: &CMatrix,
        b: &[Complex64],
        c: &[Complex64],
        d: Complex64,
        e: CMatrix,
        realization: Realization,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if a.ncols() != n { a.ncols() } else if b.len() != n { b.len() } else { c.len() },
                context: "block shapes",
            });
        }
        let body = CMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[i],
            (false, true) => c[j],
            (false, false) => d,
        });
        Self::new(body, e, realization)
    }

    pub fn identity(n: usize, r: usize, realization: Realization) -> Self {
        Self {
            n,
            r,
            body: identity(n + 1),
            odd: identity(r),
            realization,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// The even block `g′`.
    pub fn body(&self) -> &CMatrix {
        &self.body
    }

    /// The odd block `E`.
    pub fn odd(&self) -> &CMatrix {
        &self.odd
    }

    pub fn a(&self) -> CMatrix {
        self.body.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn b(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.body[(i, self.n)]).collect()
    }

    pub fn c(&self) -> Vec<Complex64> {
        (0..self.n).map(|j| self.body[(self.n, j)]).collect()
    }

    pub fn d(&self) -> Complex64 {
        self.body[(self.n, self.n)]
    }

    pub fn is_member(&self) -> MembershipReport {
        self.is_member_with(self.tol)
    }

    pub fn is_member_with(&self, tol: f64) -> MembershipReport {
        let ball_body = match self.realization {
            Realization::Ball => self.body.clone(),
            Realization::HalfPlane => {
                let cay = CayleyMatrix::new(self.n);
                cay.inverse() * &self.body * cay.matrix()
            }
        };
        let mut form = identity(self.n + 1);
        form[(self.n, self.n)] = -ONE;
        let form_residual = max_abs_diff(&(ball_body.adjoint() * &form * &ball_body), &form);
        let unitarity_residual = max_abs_diff(&(self.odd.adjoint() * &self.odd), &identity(self.r));
        let det_residual = (det(&self.body) - det(&self.odd)).norm();
        MembershipReport {
            form_residual,
            unitarity_residual,
            det_residual,
            tol,
            member: form_residual < tol && unitarity_residual < tol && det_residual < tol,
        }
    }

    /// Errors with [`Error::NotAMember`] unless all residuals are below the
    /// element's tolerance.
    pub fn ensure_member(&self) -> Result<()> {
        let rep = self.is_member();
        if rep.member {
            Ok(())
        } else {
            Err(Error::NotAMember(format!(
                "form {:.3e}, unitarity {:.3e}, det {:.3e} (tol {:.1e})",
                rep.form_residual, rep.unitarity_residual, rep.det_residual, rep.tol
            )))
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.realization != other.realization {
            return Err(Error::RealizationMismatch {
                expected: self.realization,
                found: other.realization,
            });
        }
        if self.n != other.n || self.r != other.r {
            return Err(Error::InvalidArgument(format!(
                "group elements of shape (n, r) = ({}, {}) and ({}, {})",
                self.n, self.r, other.n, other.r
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            body: &self.body * &other.body,
            odd: &self.odd * &other.odd,
            tol: self.tol.max(other.tol),
            ..self.clone()
        })
    }

    pub fn inv(&self) -> Result<Self> {
        let body = self.body.clone().try_inverse().ok_or(Error::Singular)?;
        let odd = if self.r == 0 {
            self.odd.clone()
        } else {
            self.odd.clone().try_inverse().ok_or(Error::Singular)?
        };
        Ok(Self {
            body,
            odd,
            ..self.clone()
        })
    }

    /// `R g R⁻¹` for a ball element, `R⁻¹ g R` for a half-plane element.
    pub fn switch_realization(&self) -> Self {
        let cay = CayleyMatrix::new(self.n);
        let (body, realization) = match self.realization {
            Realization::Ball => (cay.matrix() * &self.body * cay.inverse(), Realization::HalfPlane),
            Realization::HalfPlane => (cay.inverse() * &self.body * cay.matrix(), Realization::Ball),
        };
        Self {
            body,
            realization,
            ..self.clone()
        }
    }

    fn denominator(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.len(),
                context: "point dimension",
            });
        }
        let den: Complex64 = (0..self.n).map(|j| self.body[(self.n, j)] * z[j]).sum::<Complex64>() + self.d();
        if den == ZERO || !den.re.is_finite() || !den.im.is_finite() {
            return Err(Error::VanishingDenominator);
        }
        Ok(den)
    }

    /// Fractional linear action `(Az + b)(cz + d)⁻¹` on the body.
    ///
    /// The input must lie in the open domain of the element's realization and
    /// the image is checked against the same domain up to the tolerance.
    pub fn mobius(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        crate::domain::validate(self.realization, z)?;
        let out = self.mobius_unchecked(z)?;
        let (gap, scale) = match self.realization {
            Realization::Ball => (1.0 - norm_sqr(&out), 1.0),
            Realization::HalfPlane => (
                delta_h(&out, &out).re,
                1.0 + 2.0 * out[0].re.abs() + norm_sqr(&out[1..]),
            ),
        };
        if gap < -(self.tol.max(BOUNDARY_TOL)) * scale {
            return Err(Error::OutsideDomain(self.realization));
        }
        Ok(out)
    }

    /// [`mobius`](Self::mobius) without domain checks; usable on all of `ℂⁿ`
    /// away from the pole.
    pub fn mobius_unchecked(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let den = self.denominator(z)?;
        Ok((0..self.n)
            .map(|i| {
                let num: Complex64 =
                    (0..self.n).map(|j| self.body[(i, j)] * z[j]).sum::<Complex64>() + self.body[(i, self.n)];
                num / den
            })
            .collect())
    }

    /// `j(g, z) = (cz + d)⁻¹`.
    pub fn cocycle(&self, z: &[Complex64]) -> Result<Complex64> {
        Ok(self.denominator(z)?.inv())
    }
}

/// `a_t`, the one-parameter hyperbolic subgroup acting on the ball.
pub fn a_t(t: f64, n: usize, r: usize) -> GroupElement {
    let mut g = GroupElement::identity(n, r, Realization::Ball);
    let (ch, sh) = (Complex64::new(t.cosh(), 0.0), Complex64::new(t.sinh(), 0.0));
    g.body[(0, 0)] = ch;
    g.body[(0, n)] = sh;
    g.body[(n, 0)] = sh;
    g.body[(n, n)] = ch;
    g
}

/// `a′_t = R a_t R⁻¹ = diag(e^t, 1, …, 1, e^{−t})` on the half plane.
pub fn a_prime_t(t: f64, n: usize, r: usize) -> GroupElement {
    let mut g = GroupElement::identity(n, r, Realization::HalfPlane);
    g.body[(0, 0)] = Complex64::new(t.exp(), 0.0);
    g.body[(n, n)] = Complex64::new((-t).exp(), 0.0);
    g
}

/// Heisenberg element `n′_{λ,u}`, top row `(1, u*, iλ + ½u*u)`.
pub fn n_prime(lambda: f64, u: &[Complex64], r: usize) -> GroupElement {
    let n = u.len() + 1;
    let mut g = GroupElement::identity(n, r, Realization::HalfPlane);
    for (k, uk) in u.iter().enumerate() {
        g.body[(0, k + 1)] = uk.conj();
        g.body[(k + 1, n)] = *uk;
    }
    g.body[(0, n)] = Complex64::new(0.5 * norm_sqr(u), lambda);
    g
}

/// `(λ, u)·(μ, v) = (λ + μ + Im(u*v), u + v)`.
pub fn heisenberg_mul(
    (lambda, u): (f64, &[Complex64]),
    (mu, v): (f64, &[Complex64]),
) -> (f64, Vec<Complex64>) {
    let cross = crate::linalg::herm_dot(u, v).im;
    (lambda + mu + cross, u.iter().zip(v).map(|(a, b)| a + b).collect())
}

/// Central element `(ε·1, E)` with `ε` the principal `(n+1)`-th root of
/// `det E`. The same matrix acts on both realizations since it commutes
/// with the Cayley matrix.
pub fn central(e: CMatrix, n: usize, realization: Realization) -> Result<GroupElement> {
    let eps = principal_root(det(&e), n + 1);
    GroupElement::new(identity(n + 1) * eps, e, realization)
}

/// Central element with a prescribed scalar `ε`; membership requires
/// `ε^{n+1} = det E`.
pub fn central_with_scalar(eps: Complex64, e: CMatrix, n: usize, realization: Realization) -> Result<GroupElement> {
    GroupElement::new(identity(n + 1) * eps, e, realization)
}

fn principal_root(z: Complex64, k: usize) -> Complex64 {
    Complex64::from_polar(z.norm().powf(1.0 / k as f64), z.arg() / k as f64)
}

/// `j(R, z) = √2 / (1 − z₁)`.
pub fn cocycle_cayley(z: &[Complex64]) -> Result<Complex64> {
    let den = ONE - z[0];
    if den == ZERO {
        return Err(Error::CayleyPole);
    }
    Ok(Complex64::new(SQRT_2, 0.0) / den)
}

/// `j(R⁻¹, w) = √2 / (1 + w₁)`.
pub fn cocycle_cayley_inv(w: &[Complex64]) -> Result<Complex64> {
    let den = ONE + w[0];
    if den == ZERO {
        return Err(Error::CayleyPole);
    }
    Ok(Complex64::new(SQRT_2, 0.0) / den)
}

/// The partial Cayley matrix `R` of size `n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CayleyMatrix {
    n: usize,
}

impl CayleyMatrix {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.n;
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut m = identity(n + 1);
        m[(0, 0)] = s;
        m[(0, n)] = s;
        m[(n, 0)] = -s;
        m[(n, n)] = s;
        m
    }

    /// `R⁻¹ = Rᵀ`, since `R` is real orthogonal.
    pub fn inverse(&self) -> CMatrix {
        self.matrix().transpose()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct GroupElementJson {
    n: usize,
    r: usize,
    realization: Realization,
    A: Vec<Vec<Complex64>>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    d: Complex64,
    E: Vec<Vec<Complex64>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &[Vec<Complex64>], size: usize, what: &'static str) -> Result<CMatrix> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(Error::DimensionMismatch {
            expected: size,
            found: rows.iter().map(|r| r.len()).find(|&l| l != size).unwrap_or(rows.len()),
            context: what,
        });
    }
    Ok(CMatrix::from_fn(size, size, |i, j| rows[i][j]))
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GroupElementJson {
            n: self.n,
            r: self.r,
            realization: self.realization,
            A: rows(&self.a()),
            b: self.b(),
            c: self.c(),
            d: self.d(),
            E: rows(&self.odd),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = GroupElementJson::deserialize(deserializer)?;
        let build = || -> Result<GroupElement> {
            let a = from_rows(&j.A, j.n, "A block")?;
            let e = from_rows(&j.E, j.r, "E block")?;
            GroupElement::from_blocks(&a, &j.b, &j.c, j.d, e, j.realization)
        };
        build().map_err(serde::de::Error::custom)
    }
}
