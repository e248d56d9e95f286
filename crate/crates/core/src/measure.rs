//! Numerical cross-checks of the invariant volume: finite-difference
//! Jacobians of Möbius maps and a quasi-Monte-Carlo comparison of the
//! invariant mass of a small box with that of its image.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{in_domain, invariant_density};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{det, CMatrix};

pub const FD_STEP: f64 = 1e-5;

/// Central-difference complex Jacobian of a holomorphic map at `z`.
pub fn complex_jacobian<F>(f: F, z: &[Complex64], h: f64) -> Result<CMatrix>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = z.len();
    let mut jac = CMatrix::zeros(n, n);
    let mut p = z.to_vec();
    for j in 0..n {
        p[j] = z[j] + h;
        let plus = f(&p)?;
        p[j] = z[j] - h;
        let minus = f(&p)?;
        p[j] = z[j];
        if plus.len() != n || minus.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: plus.len(),
                context: "map output",
            });
        }
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianCheck {
    pub det_abs: f64,
    pub cocycle_power: f64,
    pub relative_error: f64,
}

/// Compares `|det ∂(g·z)/∂z|` with `|j(g,z)|^{n+1}`.
pub fn jacobian_check(g: &GroupElement, z: &[Complex64]) -> Result<JacobianCheck> {
    let jac = complex_jacobian(|p| g.mobius_unchecked(p), z, FD_STEP)?;
    let det_abs = det(&jac).norm();
    let cocycle_power = g.cocycle(z)?.norm().powi(g.n() as i32 + 1);
    Ok(JacobianCheck {
        det_abs,
        cocycle_power,
        relative_error: (det_abs - cocycle_power).abs() / cocycle_power,
    })
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    acc
}

/// The `i`-th Halton point in `[0,1)^dim`.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension {dim} exceeds {}", PRIMES.len());
    PRIMES[..dim].iter().map(|&p| radical_inverse(i, p)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub box_mass: f64,
    pub image_mass: f64,
    pub relative_error: f64,
    pub samples: usize,
    /// Enlargement of the sampling frame around the linearized image.
    pub frame_scale: f64,
}

const CHUNK: usize = 4096;

/// Invariant mass of the axis-parallel box `center ± half_width` (real
/// coordinates of `ℂⁿ`) against the invariant mass of its image under `g`.
///
/// The image is sampled in the frame `g·center + M v`, `M` the Jacobian at
/// the centre, with `v` over a box large enough to contain the
/// preimage of the image; points are kept when `g⁻¹ w` lies in the box.
pub fn measure_check(g: &GroupElement, center: &[Complex64], half_width: f64, samples: usize, start: u64) -> Result<MeasureReport> {
    let n = g.n();
    if center.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: center.len(),
            context: "box centre",
        });
    }
    if !(half_width > 0.0) || samples == 0 {
        return Err(Error::InvalidArgument("box needs a positive half width and samples".into()));
    }
    if 2 * n > PRIMES.len() {
        return Err(Error::InvalidArgument(format!("dimension {n} too large for the Halton sampler")));
    }
    g.ensure_member()?;
    let realization = g.realization();
    let ginv = g.inv()?;
    let point = |v: &[f64]| -> Vec<Complex64> {
        (0..n)
            .map(|i| center[i] + Complex64::new(v[2 * i], v[2 * i + 1]) * half_width)
            .collect()
    };
    for corner in 0..(1u32 << (2 * n)) {
        let v: Vec<f64> = (0..2 * n).map(|b| if corner >> b & 1 == 1 { 1.0 } else { -1.0 }).collect();
        if !in_domain(realization, &point(&v)) {
            return Err(Error::InvalidArgument("box leaves the domain".into()));
        }
    }

    let image_center = g.mobius(center)?;
    let m = complex_jacobian(|p| g.mobius_unchecked(p), center, FD_STEP)?;
    let m_inv = m.clone().try_inverse().ok_or(Error::Singular)?;
    let frame_scale = 1.05 * boundary_stretch(g, &m_inv, &image_center, half_width, &point)?;
    let frame_det = det(&m).norm_sqr();
    let unit_volume = (2.0 * half_width).powi(2 * n as i32);

    let chunks: Vec<(f64, f64)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let (mut box_sum, mut image_sum) = (0.0, 0.0);
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let v: Vec<f64> = halton(start + i as u64, 2 * n).into_iter().map(|t| 2.0 * t - 1.0).collect();
                box_sum += invariant_density(realization, &point(&v))?;
                let dv: Vec<Complex64> = (0..n).map(|k| Complex64::new(v[2 * k], v[2 * k + 1]) * (half_width * frame_scale)).collect();
                let w: Vec<Complex64> = (0..n)
                    .map(|r| image_center[r] + (0..n).map(|c| m[(r, c)] * dv[c]).sum::<Complex64>())
                    .collect();
                if !in_domain(realization, &w) {
                    continue;
                }
                let back = ginv.mobius_unchecked(&w)?;
                let inside = back
                    .iter()
                    .zip(center)
                    .all(|(b, c)| (b.re - c.re).abs() <= half_width && (b.im - c.im).abs() <= half_width);
                if inside {
                    image_sum += invariant_density(realization, &w)?;
                }
            }
            Ok((box_sum, image_sum))
        })
        .collect::<Result<_>>()?;
    let (box_sum, image_sum) = chunks.iter().fold((0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    let box_mass = box_sum / samples as f64 * unit_volume;
    let image_mass = image_sum / samples as f64 * unit_volume * frame_scale.powi(2 * n as i32) * frame_det;
    Ok(MeasureReport {
        box_mass,
        image_mass,
        relative_error: (image_mass - box_mass).abs() / box_mass,
        samples,
        frame_scale,
    })
}

/// Largest `‖M⁻¹(g z − g c)‖_∞ / h` over a grid on the box surface.
fn boundary_stretch<P>(g: &GroupElement, m_inv: &CMatrix, image_center: &[Complex64], h: f64, point: &P) -> Result<f64>
where
    P: Fn(&[f64]) -> Vec<Complex64>,
{
    let n = g.n();
    let dim = 2 * n;
    let steps = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut worst: f64 = 1.0;
    for code in 0..steps.len().pow(dim as u32) {
        let mut c = code;
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let s = steps[c % steps.len()];
                c /= steps.len();
                s
            })
            .collect();
        if v.iter().all(|x| x.abs() < 1.0) {
            continue;
        }
        let z = point(&v);
        let gz = g.mobius_unchecked(&z)?;
        let d: Vec<Complex64> = (0..n).map(|i| gz[i] - image_center[i]).collect();
        for r in 0..n {
            let y: Complex64 = (0..n).map(|c| m_inv[(r, c)] * d[c]).sum();
            worst = worst.max(y.re.abs() / h).max(y.im.abs() / h);
        }
    }
    Ok(worst)
}
