use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sbforms_core::domain::{cayley_map, cayley_map_inv, delta, delta_h, psi_coords, BallPoint, Realization};
use sbforms_core::grassmann::{apply_exterior, exterior_action, GrassmannVector, MultiIndex};
use sbforms_core::group::{a_prime_t, a_t, heisenberg_mul, n_prime, CayleyMatrix, GroupElement};
use sbforms_core::linalg::max_abs_diff;
use sbforms_core::measure::jacobian_check;
use sbforms_core::sampling::{gaussian, random_ball_point, random_half_plane_member, random_half_plane_point, random_member, random_unitary};
use sbforms_core::superfunc::{Component, SuperFunction};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// A ball function with polynomial components on every odd index.
fn polynomial_function(n: usize, r: usize, k: i64, seed: u64) -> SuperFunction {
    let mut rng = rng(seed);
    let mut f = SuperFunction::new(n, r, k, Realization::Ball).unwrap();
    for index in MultiIndex::all(r) {
        let (a, b, c) = (gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng));
        f.add_component(index, Component::new("a + b z1 + c z_n^2", move |z| Ok(a + b * z[0] + c * z[z.len() - 1] * z[z.len() - 1])))
            .unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cocycle_law(seed in any::<u64>(), n in 1usize..4, r in 0usize..3) {
        let mut rng = rng(seed);
        let g = random_member(n, r, 1.5, &mut rng);
        let h = random_member(n, r, 1.5, &mut rng);
        let z = random_ball_point(n, 0.95, &mut rng);
        let z = z.coords();
        let lhs = g.mul(&h).unwrap().cocycle(z).unwrap();
        let rhs = g.cocycle(&h.mobius(z).unwrap()).unwrap() * h.cocycle(z).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
        let gh = g.mul(&h).unwrap().mobius(z).unwrap();
        prop_assert!(max_diff(&gh, &g.mobius(&h.mobius(z).unwrap()).unwrap()) < 1e-10);
    }

    #[test]
    fn delta_transformation_law(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng(seed);
        let g = random_member(n, 1, 1.2, &mut rng);
        let z = random_ball_point(n, 0.9, &mut rng).into_vec();
        let w = random_ball_point(n, 0.9, &mut rng).into_vec();
        let lhs = delta(&g.mobius(&z).unwrap(), &g.mobius(&w).unwrap());
        let rhs = delta(&z, &w) * g.cocycle(&z).unwrap() * g.cocycle(&w).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn jacobian_matches_cocycle_power(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng(seed);
        let g = random_member(n, 0, 1.0, &mut rng);
        let z = random_ball_point(n, 0.8, &mut rng);
        prop_assert!(jacobian_check(&g, z.coords()).unwrap().relative_error < 1e-6);
    }

    #[test]
    fn heisenberg_rule(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = rng(seed);
        let (l, m) = (gaussian(&mut rng).re, gaussian(&mut rng).re);
        let u: Vec<Complex64> = (1..n).map(|_| gaussian(&mut rng)).collect();
        let v: Vec<Complex64> = (1..n).map(|_| gaussian(&mut rng)).collect();
        let (lm, uv) = heisenberg_mul((l, &u), (m, &v));
        let prod = n_prime(l, &u, 1).mul(&n_prime(m, &v, 1)).unwrap();
        prop_assert!(max_abs_diff(prod.body(), n_prime(lm, &uv, 1).body()) < 1e-12 * (1.0 + l.abs() + m.abs()));
        let id = n_prime(l, &u, 0).mul(&n_prime(-l, &u.iter().map(|x| -x).collect::<Vec<_>>(), 0)).unwrap();
        prop_assert!(max_abs_diff(id.body(), GroupElement::identity(n, 0, Realization::HalfPlane).body()) < 1e-12 * (1.0 + l.abs()));
    }

    #[test]
    fn heisenberg_preserves_level_sets(seed in any::<u64>(), t in -1.0f64..1.0) {
        let mut rng = rng(seed);
        let u = vec![gaussian(&mut rng)];
        let lambda = gaussian(&mut rng).re;
        let w = cayley_map(a_t(t, 2, 0).mobius(&[Complex64::new(0.0, 0.0); 2]).unwrap().as_slice()).unwrap();
        let nw = n_prime(lambda, &u, 0).mobius(&w).unwrap();
        prop_assert!((delta_h(&nw, &nw).re - 2.0 * (2.0 * t).exp()).abs() < 1e-10 * (2.0 * t).exp());
    }

    #[test]
    fn exterior_functoriality(seed in any::<u64>(), r in 1usize..5) {
        let mut rng = rng(seed);
        let e = random_unitary(r, &mut rng);
        let f = random_unitary(r, &mut rng);
        for index in MultiIndex::all(r) {
            let direct = exterior_action(&(&e * &f), index, r).unwrap();
            let composed = apply_exterior(&f, &exterior_action(&e, index, r).unwrap()).unwrap();
            prop_assert!(direct.max_abs_diff(&composed) < 1e-12);
        }
        // unitary compound matrices preserve the scalar product
        let mut v = GrassmannVector::zeros(r).unwrap();
        for index in MultiIndex::all(r) {
            v.set(index, gaussian(&mut rng)).unwrap();
        }
        prop_assert!((apply_exterior(&e, &v).unwrap().norm() - v.norm()).abs() < 1e-12 * v.norm());
    }

    #[test]
    fn wedge_is_associative(seed in any::<u64>(), r in 1usize..5) {
        let mut rng = rng(seed);
        let mut vs = Vec::new();
        for _ in 0..3 {
            let mut v = GrassmannVector::zeros(r).unwrap();
            for index in MultiIndex::all(r) {
                v.set(index, gaussian(&mut rng)).unwrap();
            }
            vs.push(v);
        }
        let left = vs[0].wedge(&vs[1]).unwrap().wedge(&vs[2]).unwrap();
        let right = vs[0].wedge(&vs[1].wedge(&vs[2]).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn slash_is_a_right_action(seed in any::<u64>(), r in 0usize..3, k in -2i64..6) {
        let mut rng = rng(seed);
        let f = polynomial_function(2, r, k, seed ^ 0x5a5a);
        let g = random_member(2, r, 1.0, &mut rng);
        let h = random_member(2, r, 1.0, &mut rng);
        let p = random_ball_point(2, 0.9, &mut rng);
        let twice = f.slash(&g).unwrap().slash(&h).unwrap().eval(p.coords()).unwrap();
        let once = f.slash(&g.mul(&h).unwrap()).unwrap().eval(p.coords()).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-10 * (1.0 + once.norm()));
        prop_assert_eq!(f.slash(&g).unwrap().degrees(), f.degrees());
    }

    #[test]
    fn amplitude_transports_along_the_action(seed in any::<u64>(), r in 0usize..3, k in 0i64..6) {
        let mut rng = rng(seed);
        let f = polynomial_function(2, r, k, seed ^ 0xa5a5);
        let g = random_member(2, r, 1.0, &mut rng);
        let p = random_ball_point(2, 0.8, &mut rng);
        let a = f.slash(&g).unwrap().amplitude(p.coords()).unwrap();
        let b = f.amplitude(&g.mobius(p.coords()).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + b));
        // at the centre the amplitude of f|g is the norm of the lift
        let l = f.lift(&g).unwrap().norm();
        prop_assert!((f.slash(&g).unwrap().amplitude(&[Complex64::new(0.0, 0.0); 2]).unwrap() - l).abs() < 1e-10 * (1.0 + l));
    }

    #[test]
    fn cayley_round_trips(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng(seed);
        let z = random_ball_point(n, 0.99, &mut rng).into_vec();
        let back = cayley_map_inv(&cayley_map(&z).unwrap()).unwrap();
        prop_assert!(max_diff(&z, &back) < 1e-12);
        let (x, y) = (0.1 + gaussian(&mut rng).re.abs(), gaussian(&mut rng).re);
        let u: Vec<Complex64> = (1..n).map(|_| gaussian(&mut rng)).collect();
        let w = psi_coords(x, y, &u).unwrap();
        prop_assert!((delta_h(&w, &w).re - 2.0 * x).abs() < 1e-12 * (1.0 + x));
    }

    #[test]
    fn commuting_square(seed in any::<u64>(), r in 0usize..3, k in 0i64..5) {
        let mut rng = rng(seed);
        let f = polynomial_function(2, r, k, seed ^ 0x3c3c).slash_cayley_inv().unwrap();
        let g = random_half_plane_member(2, r, 0.8, &mut rng);
        let w = random_half_plane_point(2, 0.5, 3.0, &mut rng);
        let z = cayley_map_inv(w.coords()).unwrap();
        // (f|g)|R versus (f|R)|(R⁻¹gR)
        let lhs = f.slash(&g).unwrap().slash_cayley().unwrap().eval(&z).unwrap();
        let rhs = f.slash_cayley().unwrap().slash(&g.switch_realization()).unwrap().eval(&z).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + lhs.norm()));
        let round = f.slash_cayley().unwrap().slash_cayley_inv().unwrap().eval(w.coords()).unwrap();
        prop_assert!(round.max_abs_diff(&f.eval(w.coords()).unwrap()) < 1e-12 * (1.0 + round.norm()));
    }
}

#[test]
fn conjugated_a_t_is_a_prime_t() {
    let cay = CayleyMatrix::new(2);
    for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let conj = cay.matrix() * a_t(t, 2, 0).body() * cay.inverse();
        assert!(max_abs_diff(&conj, a_prime_t(t, 2, 0).body()) < 1e-12);
    }
}

#[test]
fn delta_h_matches_pulled_back_delta() {
    let mut rng = rng(3);
    for _ in 0..50 {
        let z = random_half_plane_point(3, 0.2, 2.0, &mut rng).into_vec();
        let w = random_half_plane_point(3, 0.2, 2.0, &mut rng).into_vec();
        let (bz, bw) = (cayley_map_inv(&z).unwrap(), cayley_map_inv(&w).unwrap());
        let jz = sbforms_core::group::cocycle_cayley_inv(&z).unwrap();
        let jw = sbforms_core::group::cocycle_cayley_inv(&w).unwrap();
        let pulled = delta(&bz, &bw) / (jz * jw.conj());
        assert!((pulled - delta_h(&z, &w)).norm() < 1e-10 * (1.0 + pulled.norm()));
    }
}

#[test]
fn lift_is_equivariant_under_the_cusp_generator() {
    use sbforms_core::fourier::{synthesize, CuspData, FourierMode};
    // χ = 1/12 makes ε³ = det exp(2πiD) for D = diag(1/4, 1/2)
    let cusp = CuspData::new(2.0, 1.0 / 12.0, vec![0.25, 0.5]).unwrap();
    let k = 3;
    let mut modes = Vec::new();
    for index in MultiIndex::all(2) {
        for (label, m) in cusp.lattice_points(index, k, -3..=0).unwrap() {
            if m < 0.0 {
                let c = Complex64::new(1.0 + label as f64 * 0.3, 0.2 * index.len() as f64);
                modes.push(FourierMode::new(index, m, Component::new("c + w2", move |u| Ok(c + u[0]))));
            }
        }
    }
    let big_f = synthesize(2, 2, k, &modes).unwrap();
    let gamma_h = cusp.generator(2).unwrap();
    let w = [Complex64::new(1.3, 0.4), Complex64::new(0.2, -0.5)];
    let invariance = big_f.slash(&gamma_h).unwrap().eval(&w).unwrap();
    assert!(invariance.max_abs_diff(&big_f.eval(&w).unwrap()) < 1e-10);

    let f = big_f.slash_cayley().unwrap();
    let gamma = gamma_h.switch_realization();
    let mut rng = rng(9);
    for _ in 0..20 {
        let g = random_member(2, 2, 1.0, &mut rng);
        let a = f.lift(&gamma.mul(&g).unwrap()).unwrap();
        let b = f.lift(&g).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10 * (1.0 + b.norm()), "{a:?} vs {b:?}");
    }
}

#[test]
fn slash_by_identity_is_pointwise_identity() {
    let f = polynomial_function(3, 2, 4, 1);
    let id = GroupElement::identity(3, 2, Realization::Ball);
    let p = BallPoint::new(vec![Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.0), Complex64::new(0.0, 0.4)]).unwrap();
    assert_eq!(f.slash(&id).unwrap().eval(p.coords()).unwrap(), f.eval(p.coords()).unwrap());
}
