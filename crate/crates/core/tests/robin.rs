mod common;

use common::{c, robin_ball, robin_simplex};
use mongefoil_core::extremal::CenterRule;
use mongefoil_core::geometry::{contains, symmetrize};
use mongefoil_core::robin::{
    boundary_scale, forgetful_map, indicatrix_contains, indicatrix_sample, robin_exp_map, robin_function,
};
use mongefoil_core::{ConvexBody, Error};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn direction() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.hypot(*b) > 1e-2))
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

fn bodies() -> Vec<ConvexBody> {
    vec![common::square(), common::triangle(), common::rectangle(), common::heptagon()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circle_invariance(v in direction(), theta in 0.0f64..6.3) {
        let rot: Vec<Complex64> = v.iter().map(|x| x * Complex64::from_polar(1.0, theta)).collect();
        for body in bodies() {
            let a = robin_function(&body, &v).unwrap().value;
            let b = robin_function(&body, &rot).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn log_homogeneity(v in direction(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let lambda = c(re, im);
        prop_assume!(lambda.norm() > 0.05);
        let scaled: Vec<Complex64> = v.iter().map(|x| x * lambda).collect();
        for body in bodies() {
            let a = robin_function(&body, &v).unwrap().value;
            let b = robin_function(&body, &scaled).unwrap().value;
            prop_assert!((b - a - lambda.norm().ln()).abs() <= 1e-9);
        }
    }

    #[test]
    fn symmetrization_bounds_robin(v in direction()) {
        // The centered extremal ellipses of K fit in (K - K)/2, so the
        // symmetrization can only lower the Robin function.
        for body in bodies() {
            let sym = symmetrize(&body).unwrap();
            let a = robin_function(&body, &v).unwrap().value;
            let b = robin_function(&sym, &v).unwrap().value;
            prop_assert!(b <= a + 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn symmetrization_agrees_on_real_directions(angle in 0.0f64..6.3) {
        let v = [c(angle.cos(), 0.0), c(angle.sin(), 0.0)];
        for body in bodies() {
            let sym = symmetrize(&body).unwrap();
            let a = robin_function(&body, &v).unwrap().value;
            let b = robin_function(&sym, &v).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn simplex_matches_closed_form(v in direction()) {
        let got = robin_function(&common::triangle(), &v).unwrap().value;
        prop_assert!((got - robin_simplex(&v)).abs() <= 1e-9);
    }

    #[test]
    fn conjugation_invariance(v in direction()) {
        let vc: Vec<Complex64> = v.iter().map(|x| x.conj()).collect();
        for body in bodies() {
            let a = robin_function(&body, &v).unwrap().value;
            let b = robin_function(&body, &vc).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn ball_matches_closed_form(v in direction()) {
        let got = robin_function(&common::unit_ball(), &v).unwrap().value;
        prop_assert!((got - robin_ball(&v)).abs() <= 1e-7);
    }

    #[test]
    fn forgetful_circle_lies_in_symmetrization(v in direction(), theta in 0.0f64..6.3) {
        for body in bodies() {
            let t = boundary_scale(&body, &v).unwrap();
            let w: Vec<Complex64> = v.iter().map(|x| x * t).collect();
            let p = forgetful_map(&body, &w, Complex64::from_polar(1.0, theta)).unwrap();
            let p = p.finite().unwrap();
            prop_assert!(p.iter().all(|x| x.im.abs() < 1e-12));
            let re: Vec<f64> = p.iter().map(|x| x.re).collect();
            let sym = symmetrize(&body).unwrap();
            prop_assert!(contains(&sym, &re, 1e-8));
        }
    }
}

#[test]
fn real_slice_of_symmetric_bodies_is_half_the_body() {
    // For a body symmetric about 0, t u is on the indicatrix boundary iff
    // 2 t u is on the boundary of K (u real).
    let sym = ConvexBody::from_vertices(vec![vec![2.0, 0.0], vec![0.0, 1.0], vec![-2.0, 0.0], vec![0.0, -1.0]]).unwrap();
    let radial = |u: [f64; 2]| 2.0 / (u[0].abs() + 2.0 * u[1].abs());
    let sq_radial = |u: [f64; 2]| 1.0 / u[0].abs().max(u[1].abs());
    let hex = common::hexagon();
    for k in 0..60 {
        let a = 2.0 * PI * k as f64 / 60.0;
        let u = [a.cos(), a.sin()];
        let v = [c(u[0], 0.0), c(u[1], 0.0)];
        let t = boundary_scale(&sym, &v).unwrap();
        assert!((t - 0.5 * radial(u)).abs() <= 1e-6);
        let t = boundary_scale(&common::square(), &v).unwrap();
        assert!((t - 0.5 * sq_radial(u)).abs() <= 1e-6);
        let t = boundary_scale(&hex, &v).unwrap();
        let p = [2.0 * t * u[0], 2.0 * t * u[1]];
        assert!(contains(&hex, &p, 1e-9));
        assert!(!contains(&hex, &[p[0] * (1.0 + 1e-6), p[1] * (1.0 + 1e-6)], 1e-9));
    }
}

#[test]
fn symmetrization_changes_robin_of_the_triangle() {
    // Near-circular direction: the largest circle in the triangle has radius
    // 1 / (2 + sqrt 2), the one in its difference body sqrt(2) / 4.
    let v = [c(0.0, 0.286), c(-0.29, 0.0)];
    let tri = common::triangle();
    let a = robin_function(&tri, &v).unwrap().value;
    let b = robin_function(&symmetrize(&tri).unwrap(), &v).unwrap().value;
    assert!((a - robin_simplex(&v)).abs() < 1e-9);
    assert!(a - b > 0.15, "{a} vs {b}");
}

#[test]
fn ball_boundary_family() {
    let ball = common::unit_ball();
    for k in 0..=20 {
        let t = -1.0 + 0.1 * k as f64;
        let v = [c(0.5, 0.0), c(0.0, 0.5 * t)];
        let r = robin_function(&ball, &v).unwrap();
        assert!(r.value.abs() <= 1e-8, "t = {t}: {}", r.value);
        assert!(indicatrix_sample(&ball, &v).unwrap().on_boundary);
    }
}

#[test]
fn indicatrix_membership() {
    let sq = common::square();
    assert!(indicatrix_contains(&sq, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap());
    assert!(indicatrix_contains(&sq, &[c(0.4, 0.0), c(0.0, 0.0)]).unwrap());
    assert!(!indicatrix_contains(&sq, &[c(0.6, 0.0), c(0.0, 0.0)]).unwrap());
    assert!(indicatrix_contains(&sq, &[c(0.5, 0.0), c(0.0, 0.0)]).unwrap());
}

#[test]
fn exponential_map() {
    let sq = common::square();
    let v = [c(0.5, 0.0), c(0.0, 0.5)];
    let p = robin_exp_map(&sq, &v, c(1.0, 0.0), &CenterRule::Barycenter).unwrap();
    let p = p.finite().unwrap();
    assert!((p[0] - c(1.0, 0.0)).norm() < 1e-10 && (p[1] - c(0.0, 0.0)).norm() < 1e-10);
    assert!(robin_exp_map(&sq, &v, c(0.0, 0.0), &CenterRule::Barycenter).unwrap().finite().is_none());
    let shifted = robin_exp_map(&sq, &v, c(0.0, 1.0), &CenterRule::Given(vec![0.25, 0.0])).unwrap();
    let shifted = shifted.finite().unwrap();
    assert!((shifted[0] - c(0.25, 0.0)).norm() < 1e-10);
    assert!(matches!(robin_exp_map(&sq, &v, c(1.5, 0.0), &CenterRule::Barycenter), Err(Error::OutsideParameterDisk(_))));
    // Off the boundary by more than the rescaling limit.
    assert!(robin_exp_map(&sq, &[c(1.0, 0.0), c(0.0, 1.0)], c(0.5, 0.0), &CenterRule::Barycenter).is_err());
    // Slightly off: rescaled onto the boundary.
    let near = [c(0.5 * 1.0005, 0.0), c(0.0, 0.5 * 1.0005)];
    let q = robin_exp_map(&sq, &near, c(1.0, 0.0), &CenterRule::Barycenter).unwrap();
    assert!((q.finite().unwrap()[0] - c(1.0, 0.0)).norm() < 1e-9);
}
