use std::f64::consts::PI;

use super::*;
use crate::geom::standard::{flat_torus, round_sphere};
use crate::ode::taylor::second_order_coefficients;
use crate::ode::{delaunay_potential, delaunay_torus_metric, rk, solve_delaunay, sphere2_metric, Sphere2Params};
use crate::verify::verify;
use num_complex::Complex64;

fn label(a: f64, b: f64, c: f64) -> TodaLabel {
    toda_classify(&RicciType::new(a, b, c)).unwrap().label
}

#[test]
fn classification_table() {
    for c in [1.0, -2.0, 0.5] {
        assert_eq!(label(6.0, -3.0 * c, c), TodaLabel::A2);
        assert_eq!(label(4.0, -c, c), TodaLabel::B2);
        assert_eq!(label(6.0, -2.0 * c, c), TodaLabel::TB2);
        assert_eq!(label(6.0, -c, c), TodaLabel::G2);
        assert_eq!(label(10.0 / 3.0, -c / 3.0, c), TodaLabel::TG2);
        assert_eq!(label(4.0, 0.0, c), TodaLabel::A1affine);
        assert_eq!(label(6.0, 0.0, c), TodaLabel::A2affine);
        assert_eq!(label(3.0, 0.0, c), TodaLabel::TA2affine);
        assert_eq!(label(5.0, 0.0, c), TodaLabel::None);
        assert_eq!(label(6.0, -1.5 * c, c), TodaLabel::None);
    }
}

#[test]
fn classification_tolerates_rounding() {
    let ty = RicciType::new(6.0, -3.0 * -0.5462093230621441, -0.5462093230621441).homothety(1.113519167904789);
    assert_eq!(toda_classify(&ty).unwrap().label, TodaLabel::A2);
    assert_eq!(label(6.0, -3.0 * (1.0 + 1e-9), 1.0), TodaLabel::None);
    assert_eq!(label(PI, 0.0, 1.0), TodaLabel::None);
    assert_eq!(label(6.0, -2.0_f64.sqrt(), 1.0), TodaLabel::None);
}

#[test]
fn classification_matrix_and_json() {
    let t = toda_classify(&RicciType::new(6.0, -3.0, 1.0)).unwrap();
    assert_eq!(t.xi, -0.5);
    // (−1/4)·A2
    assert_eq!(t.matrix, [[-0.5, 0.25], [0.25, -0.5]]);
    let v = serde_json::to_value(&t).unwrap();
    assert_eq!(v["label"], "A2");
    for k in ["a", "b", "c", "xi", "matrix", "label"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(serde_json::to_value(label(10.0 / 3.0, -1.0 / 3.0, 1.0)).unwrap(), "tG2");
}

#[test]
fn classification_preconditions() {
    assert!(toda_classify(&RicciType::new(0.0, 0.0, 1.0)).is_err());
    assert!(toda_classify(&RicciType::new(2.0, 0.0, 1.0)).is_err());
    assert!(toda_classify(&RicciType::new(4.0, 0.0, 0.0)).is_err());
    // ε must be sgn(c/(2 − a)) = −1 here
    assert!(toda_classify(&RicciType::new(4.0, 0.0, 1.0).with_epsilon(1)).is_err());
    assert!(toda_classify(&RicciType::new(4.0, 0.0, 1.0).with_epsilon(-1)).is_ok());
}

#[test]
fn no_type_gives_a_diagonal_matrix() {
    // A₁ × A₁ would need 4/(2 − a) = 0
    for a in [-10.0, -1.0, 0.5, 3.0, 7.0, 100.0] {
        let t = toda_classify(&RicciType::new(a, 1.0, 1.0)).unwrap();
        assert!(t.matrix[0][1] != 0.0);
    }
}

fn delaunay(a: f64, c: f64, n: usize) -> ConformalMetric {
    let p = solve_delaunay(a, c, delaunay_potential(a, c, 0.0) + 0.1).unwrap();
    delaunay_torus_metric(&p, 1.0, 0.0, n).unwrap()
}

#[test]
fn sinh_gordon_reduction() {
    let chart = Chart::torus(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), 16, 16).unwrap();
    for c in [1.0, 2.5] {
        let u = ScalarField::constant(&[chart.clone()], -f64::ln(c));
        assert!(sinh_gordon_residual(&u, c).unwrap().sup_abs() < 1e-15);
        let m = delaunay(4.0, c, 48);
        let u1 = reduction_u1(&m, reduction_scale(4.0, c).unwrap()).unwrap();
        let r = sinh_gordon_residual(&u1, c).unwrap().sup_abs();
        assert!(r < 1e-6, "c={c}: {r}");
        let bumped = reduction_u1(&m.perturbed(0.05, (0.5, 0.5), 0.05), reduction_scale(4.0, c).unwrap()).unwrap();
        assert!(sinh_gordon_residual(&bumped, c).unwrap().sup_abs() > 1e-2);
    }
    assert!(sinh_gordon_residual(&ScalarField::constant(&[chart], 0.0), -1.0).is_err());
}

#[test]
fn literal_gauge_holds_only_for_unit_c() {
    // in the Delaunay coordinate itself (|h|² = c) the residual vanishes only for c = 1
    for (c, zero) in [(1.0, true), (2.5, false)] {
        let u1 = reduction_u1(&delaunay(4.0, c, 32), 1.0).unwrap();
        let r = sinh_gordon_residual(&u1, c).unwrap().sup_abs();
        assert_eq!(r < 1e-6, zero, "c={c}: {r}");
    }
}

#[test]
fn tzitzeica_reduction() {
    let chart = Chart::torus(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), 16, 16).unwrap();
    let u = ScalarField::constant(&[chart], -f64::ln(1.5));
    assert!(tzitzeica_residual(&u, 3.0).unwrap().sup_abs() < 1e-15);
    for c in [1.0, 3.0] {
        let m = delaunay(6.0, c, 48);
        let lambda = reduction_scale(6.0, c).unwrap();
        let r = tzitzeica_residual(&reduction_u1(&m, lambda).unwrap(), c).unwrap().sup_abs();
        assert!(r < 1e-6, "c={c}: {r}");
        let bumped = reduction_u1(&m.perturbed(0.05, (0.5, 0.5), 0.05), lambda).unwrap();
        assert!(tzitzeica_residual(&bumped, c).unwrap().sup_abs() > 1e-2);
    }
    assert!(reduction_scale(5.0, 1.0).is_err());
}

#[test]
fn grid_reduction_matches_closed_form() {
    let m = delaunay(4.0, 1.0, 128);
    let grid = ConformalMetric::torus_grid(m.charts()[0].clone(), m.factor.samples()[0].clone(), "grid").unwrap();
    let r = sinh_gordon_residual(&reduction_u1(&grid, 1.0).unwrap(), 1.0).unwrap().sup_abs();
    assert!(r < 1e-4, "{r}");
}

#[test]
fn umbilic_sphere() {
    let m = round_sphere(1.0, 32).unwrap();
    let d = immersion_data_check(&m, &RicciType::new(4.0, 0.0, 1.0), 1.0, 0.0, Signature::Riemannian).unwrap();
    assert!(d.umbilic);
    assert!(d.gauss_residual < 1e-12);
    assert_eq!(d.q_modulus.sup_abs(), 0.0);
}

#[test]
fn cmc_data_from_delaunay() {
    let m = delaunay(4.0, 1.0, 64);
    let ty = RicciType::new(4.0, 0.0, 1.0);
    let d = immersion_data_check(&m, &ty, 0.0, 1.0, Signature::Riemannian).unwrap();
    assert!(!d.umbilic);
    assert!(d.gauss_residual < 1e-5, "{}", d.gauss_residual);
    assert!(d.codazzi_residual < 1e-5, "{}", d.codazzi_residual);
    let (lo, hi) = d.q_modulus.min_max();
    assert!((lo - 0.5).abs() < 1e-6 && (hi - 0.5).abs() < 1e-6);
    // Gauss residual and curvature-equation residual agree on pass/fail
    assert!(verify(&m, &ty, 1.0).unwrap().verdict.pass);
    // K ≤ c + H² fails for the Lorentzian sign condition
    assert!(matches!(
        immersion_data_check(&m, &ty, 2.0, 1.0, Signature::Lorentzian),
        Err(Error::NoImmersion(_))
    ));
    assert!(immersion_data_check(&m, &ty, 0.5, 1.0, Signature::Riemannian).is_err());
}

/// Planar metric f = y(v), y'' = e^(2y) − e^(−2y), y(0) = 0.2, y'(0) = 0:
/// type (4, 0, −1) with K ≥ −1.
fn lorentzian_plane(n: usize) -> ConformalMetric {
    let rhs = |_t: f64, s: &[f64; 2]| [s[1], (2.0 * s[0]).exp() - (-2.0 * s[0]).exp()];
    let traj = Arc::new(rk::integrate(&rhs, 0.0, [0.2, 0.0], 0.6, 1e-13, 1e-3).unwrap());
    let f: PointFn = Arc::new(move |_x, v, d| {
        let s = traj.eval(&rhs, v.abs());
        let p = if v < 0.0 { -s[1] } else { s[1] };
        let t = second_order_coefficients(s[0], p, d, |y| y.scale(2.0).exp() - y.scale(-2.0).exp());
        Jet::var_y(v, d).compose(&t[..=d])
    });
    let chart = Chart::plane((-0.5, 0.5), (-0.5, 0.5), n, n).unwrap();
    ConformalMetric::plane(chart, f, crate::jet::MAX_DEG, "translation-invariant (4, 0, −1) plane").unwrap()
}

#[test]
fn spacelike_cmc_data() {
    let m = lorentzian_plane(32);
    let ty = RicciType::new(4.0, 0.0, -1.0);
    let d = immersion_data_check(&m, &ty, 0.0, 1.0, Signature::Lorentzian).unwrap();
    assert!(d.gauss_residual < 1e-5, "{}", d.gauss_residual);
    assert!(d.codazzi_residual < 1e-5, "{}", d.codazzi_residual);
    assert!(matches!(
        immersion_data_check(&m, &RicciType::new(4.0, 0.0, -1.0), -2.0, 1.0, Signature::Riemannian),
        Err(Error::NoImmersion(_))
    ));
}

#[test]
fn energy_values() {
    assert!(energy(&round_sphere(1.0, 64).unwrap()).unwrap().value.abs() < 1e-10);
    let flat = flat_torus(Complex64::new(1.0, 0.0), Complex64::new(0.2, 1.1), 32).unwrap();
    assert_eq!(energy(&flat).unwrap().value, 0.0);
    // round sphere of curvature κ: 4π log κ
    let e = energy(&round_sphere(2.0, 64).unwrap()).unwrap().value;
    assert!((e - 4.0 * PI * 2f64.ln()).abs() < 1e-8, "{e}");
}

#[test]
fn energy_scaling_law() {
    let s = sphere2_metric(Sphere2Params::new(1, 0.0).unwrap(), 128).unwrap();
    let d = energy_scaling_defect(&s, 1.0).unwrap();
    assert!(d.abs() < 1e-4, "{d}");
    let e0 = energy(&s).unwrap().value;
    let e1 = energy(&s.scaled(1.0)).unwrap().value;
    assert!((e1 - e0 + 8.0 * PI).abs() < 1e-4);
    let t = delaunay(4.0, 1.0, 64);
    for tt in [-1.0, 0.5, 1.0] {
        assert!(energy_scaling_defect(&t, tt).unwrap().abs() < 1e-4);
    }
}
