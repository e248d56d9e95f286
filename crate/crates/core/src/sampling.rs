//! Seeded random fixtures: unitary matrices, group members and domain points.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::{BallPoint, HalfPlanePoint};
use crate::group::{a_t, n_prime, GroupElement, Realization};
use crate::linalg::{det, CMatrix};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-distributed unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Random element of the maximal compact subgroup: `diag(A, d)` with `A`
/// unitary and `d = det E / det A`.
pub fn random_compact<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> GroupElement {
    let a = random_unitary(n, rng);
    let e = random_unitary(r, rng);
    let d = det(&e) / det(&a);
    let zero = vec![Complex64::new(0.0, 0.0); n];
    GroupElement::from_blocks(&a, &zero, &zero, d, e, Realization::Ball).expect("consistent shapes")
}

/// Random ball member `k₁ a_t k₂` with `|t| ≤ t_max`.
pub fn random_member<R: Rng + ?Sized>(n: usize, r: usize, t_max: f64, rng: &mut R) -> GroupElement {
    let k1 = random_compact(n, r, rng);
    let k2 = random_compact(n, r, rng);
    let t = rng.gen_range(-t_max..=t_max);
    k1.mul(&a_t(t, n, r)).and_then(|g| g.mul(&k2)).expect("same shapes")
}

/// Random half-plane member: a conjugated ball member times a Heisenberg
/// translation.
pub fn random_half_plane_member<R: Rng + ?Sized>(n: usize, r: usize, t_max: f64, rng: &mut R) -> GroupElement {
    let g = random_member(n, r, t_max, rng).switch_realization();
    let lambda = rng.gen_range(-2.0..2.0);
    let u: Vec<Complex64> = (1..n).map(|_| gaussian(rng) * 0.5).collect();
    n_prime(lambda, &u, r).mul(&g).expect("same shapes")
}

/// Uniform direction, radius uniform in `[0, max_radius)`.
pub fn random_ball_point<R: Rng + ?Sized>(n: usize, max_radius: f64, rng: &mut R) -> BallPoint {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let radius = rng.gen_range(0.0..max_radius);
    BallPoint::new(v.into_iter().map(|x| x * (radius / norm)).collect()).expect("radius below one")
}

/// Point of `H` with `Δ′(w, w)/2` uniform in `[x_lo, x_hi]`.
pub fn random_half_plane_point<R: Rng + ?Sized>(n: usize, x_lo: f64, x_hi: f64, rng: &mut R) -> HalfPlanePoint {
    let x = rng.gen_range(x_lo..x_hi);
    let y = rng.gen_range(-2.0..2.0);
    let u: Vec<Complex64> = (1..n).map(|_| gaussian(rng) * 0.7).collect();
    crate::domain::psi(x, y, &u).expect("positive x")
}
