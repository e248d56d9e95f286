use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use sbforms_core::domain::HalfPlanePoint;
use sbforms_core::fourier::{expand, fourier_coefficient, synthesize, CuspData, FourierMode};
use sbforms_core::grassmann::MultiIndex;
use sbforms_core::superfunc::Component;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn twisted_cusp() -> CuspData {
    CuspData::new(2.0, 0.25, vec![0.25, 0.5]).unwrap()
}

/// Modes `(I, label, coefficient)` on the twisted lattice, `c_{I,m}(w₂) = a + b w₂`.
fn fixture() -> Vec<(MultiIndex, i64, Complex64, Complex64)> {
    vec![
        (MultiIndex::EMPTY, -1, c(1.5, -0.5), c(0.2, 0.0)),
        (MultiIndex::EMPTY, -3, c(-0.7, 0.3), c(0.0, 0.0)),
        (MultiIndex::from_bits(0b01), -2, c(2.0, 1.0), c(0.0, -0.4)),
        (MultiIndex::from_bits(0b10), 0, c(0.25, 0.0), c(0.1, 0.1)),
        (MultiIndex::from_bits(0b11), -1, c(-1.0, -1.0), c(0.5, 0.0)),
    ]
}

fn build_modes(cusp: &CuspData, k: i64) -> Vec<FourierMode> {
    fixture()
        .into_iter()
        .map(|(index, label, a, b)| {
            let m = (label as f64 - cusp.twist(index, k).unwrap()) / cusp.lambda0();
            FourierMode::new(index, m, Component::new("a + b w2", move |u| Ok(a + b * u[0])))
        })
        .collect()
}

#[test]
fn analysis_inverts_synthesis_on_the_twisted_lattice() {
    let cusp = twisted_cusp();
    let k = 3;
    let modes = build_modes(&cusp, k);
    for m in &modes {
        assert!(m.is_on_lattice(&cusp, k).unwrap());
    }
    let q = synthesize(2, 2, k, &modes).unwrap();
    let bases = [
        HalfPlanePoint::new(vec![c(0.8, 0.0), c(0.3, -0.2)]).unwrap(),
        HalfPlanePoint::new(vec![c(1.4, 0.6), c(-0.5, 0.1)]).unwrap(),
    ];
    let entries = expand(&q, &cusp, -6..=6, &bases, 1024).unwrap();
    for e in &entries {
        let u = e.base[1];
        let expected = fixture()
            .into_iter()
            .find(|(i, label, _, _)| *i == e.index && *label == e.label)
            .map(|(_, _, a, b)| a + b * u)
            .unwrap_or(c(0.0, 0.0));
        let got = e.coefficient();
        if expected.norm() > 0.0 {
            assert!((got - expected).norm() < 1e-10 * expected.norm(), "{:?}: {got} vs {expected}", e.index);
        } else {
            // unused slots are judged on the quadrature value itself, before
            // dividing out e^{2πm w₁}
            assert!(e.value.norm() < 1e-10, "{:?} m={} leaked {}", e.index, e.m, e.value);
        }
    }
}

#[test]
fn recovered_coefficient_ignores_the_real_part_of_the_base() {
    let cusp = twisted_cusp();
    let modes = build_modes(&cusp, 3);
    let q = synthesize(2, 2, 3, &modes).unwrap();
    let mode = &modes[2];
    let u = c(0.3, 0.1);
    let values: Vec<Complex64> = [0.2, 0.9, 2.5]
        .iter()
        .map(|x| {
            let base = HalfPlanePoint::new(vec![c(*x, 0.4), u]).unwrap();
            let v = fourier_coefficient(|w| q.eval_component(mode.index, w), mode.m, &base, &cusp, 256).unwrap();
            v * (base.w1() * (-2.0 * PI * mode.m)).exp()
        })
        .collect();
    for v in &values[1..] {
        assert!((v - values[0]).norm() < 1e-10 * values[0].norm());
    }
}

#[test]
fn periodic_fixture_is_twisted_periodic() {
    let cusp = twisted_cusp();
    let k = 3;
    let q = synthesize(2, 2, k, &build_modes(&cusp, k)).unwrap();
    let w = [c(0.9, -0.3), c(0.2, 0.2)];
    let shifted = [w[0] + c(0.0, cusp.lambda0()), w[1]];
    for index in MultiIndex::all(2) {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * cusp.twist(index, k).unwrap());
        let lhs = q.eval_component(index, &w).unwrap();
        let rhs = q.eval_component(index, &shifted).unwrap() * phase;
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_band_limited_sums_are_recovered(
        coeffs in prop::collection::vec((-8i64..=0, -2.0f64..2.0, -2.0f64..2.0), 1..6),
        lambda0 in 0.5f64..3.0,
        chi in -0.5f64..0.5,
        x in 0.3f64..2.0,
    ) {
        let cusp = CuspData::new(lambda0, chi, vec![]).unwrap();
        let mut modes = Vec::new();
        for (label, re, im) in &coeffs {
            let m = (*label as f64 - cusp.twist(MultiIndex::EMPTY, 1).unwrap()) / lambda0;
            modes.push(FourierMode::new(MultiIndex::EMPTY, m, Component::constant(c(*re, *im))));
        }
        let q = synthesize(2, 0, 1, &modes).unwrap();
        let base = HalfPlanePoint::new(vec![c(x, 0.0), c(0.0, 0.0)]).unwrap();
        for label in -8..=0i64 {
            let m = (label as f64 - cusp.twist(MultiIndex::EMPTY, 1).unwrap()) / lambda0;
            let expected: Complex64 = coeffs
                .iter()
                .filter(|(l, _, _)| *l == label)
                .map(|(_, re, im)| c(*re, *im))
                .sum::<Complex64>() * (base.w1() * (2.0 * PI * m)).exp();
            let got = fourier_coefficient(|w| q.eval_component(MultiIndex::EMPTY, w), m, &base, &cusp, 64).unwrap();
            prop_assert!((got - expected).norm() < 1e-10 * (1.0 + expected.norm()));
        }
    }
}
