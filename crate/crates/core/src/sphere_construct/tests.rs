use super::*;
use crate::geom::{curvature, integrate, RicciType, ScalarField};
use crate::ode::{sphere2_metric, Sphere2Params};
use crate::verify::verify;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sorted_orders(data: &[ConicalDatum]) -> Vec<u32> {
    let mut o: Vec<u32> = data.iter().map(|d| d.order).collect();
    o.sort();
    o
}

#[test]
fn aberth_roots_with_multiplicity() {
    // (z − 1)³(z + 2)(z − i)
    let mut p = vec![c(1.0)];
    for r in [c(1.0), c(1.0), c(1.0), c(-2.0), Complex64::new(0.0, 1.0)] {
        p = poly::mul(&p, &[-r, c(1.0)]);
    }
    let mut roots = poly::roots(&p).unwrap();
    roots.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.re.partial_cmp(&b.0.re).unwrap()));
    assert_eq!(roots.iter().map(|r| r.1).collect::<Vec<_>>(), vec![1, 1, 3]);
    assert!((roots[2].0 - c(1.0)).norm() < 1e-4);
    assert!((roots[0].0 - c(-2.0)).norm() < 1e-10);
    assert!(poly::roots(&[c(0.0), c(0.0), c(2.0)]).unwrap() == vec![(c(0.0), 2)]);
}

#[test]
fn monomial_critical_data() {
    for ell in 1..=4u32 {
        let data = critical_data(&RationalMap::monomial(ell as usize + 1).unwrap()).unwrap();
        assert_eq!(data.len(), 2);
        assert!(data.contains(&ConicalDatum { point: Some((0.0, 0.0)), order: ell }));
        assert!(data.contains(&ConicalDatum { point: None, order: ell }));
    }
}

#[test]
fn cubic_critical_data() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let data = critical_data(&g).unwrap();
    assert_eq!(data.len(), 3);
    let inf = data.iter().find(|d| d.point.is_none()).unwrap();
    assert_eq!(inf.order, 2);
    let mut fin: Vec<(f64, f64)> = data.iter().filter_map(|d| d.point).collect();
    fin.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!((fin[0].0 + 1.0).abs() < 1e-12 && (fin[1].0 - 1.0).abs() < 1e-12);
    assert!(fin.iter().all(|p| p.1.abs() < 1e-12));
    assert_eq!(2 + data.iter().map(|d| d.order).sum::<u32>(), 2 * 3);
}

#[test]
fn rational_critical_data_and_validation() {
    // G = 1/z²: critical points 0 and ∞, each of order 1
    let g = RationalMap::new(&[c(1.0)], &[c(0.0), c(0.0), c(1.0)]).unwrap();
    assert_eq!(sorted_orders(&critical_data(&g).unwrap()), vec![1, 1]);
    // G = z²/(z² + 1): Wronskian 2z, so 0 and ∞
    let g = RationalMap::new(&[c(0.0), c(0.0), c(1.0)], &[c(1.0), c(0.0), c(1.0)]).unwrap();
    assert_eq!(sorted_orders(&critical_data(&g).unwrap()), vec![1, 1]);
    assert!(RationalMap::new(&[c(-1.0), c(0.0), c(1.0)], &[c(1.0), c(1.0)]).is_err());
    assert!(RationalMap::polynomial(&[3.0]).is_err());
    assert!(RationalMap::new(&[c(1.0)], &[c(0.0)]).is_err());
    let json: RationalMap = serde_json::from_str(r#"{"numerator": [[0,0],[-3,0],[0,0],[1,0]]}"#).unwrap();
    assert_eq!(json.degree(), 3);
    assert!(serde_json::from_str::<RationalMap>(r#"{"numerator": [[1,0]], "bogus": 1}"#).is_err());
}

#[test]
fn partitions() {
    assert!(validate_partition(&[1, 1, 2], 2).is_ok());
    assert!(validate_partition(&[3, 1], 2).is_err());
    assert!(validate_partition(&[1, 1], 2).is_err());
    assert!(validate_partition(&[2, 2], 2).is_ok());
}

#[test]
fn z_squared_pullback() {
    let m = pullback_spherical(&RationalMap::monomial(2).unwrap(), 1, 64).unwrap();
    // dσ² = 8|z|²/(1+|z|⁴)²|dz|²
    for &(x, y) in &[(0.3, 0.2), (-0.7, 0.5), (1.1, -0.4)] {
        let r2: f64 = x * x + y * y;
        let oracle = -0.5 * (8.0 * r2 / (1.0 + r2 * r2).powi(2)).ln();
        assert!((m.factor.parts[0].value_at(x, y) - oracle).abs() < 1e-13);
    }
    let k = curvature(&m).unwrap();
    let dev = k.map_samples(|v| v - 2.0).unwrap().sup_abs();
    assert!(dev < 1e-6, "{dev}");
    for cone in &m.cones {
        let beta = cone_exponent(&m, cone.part, cone.x, cone.y);
        assert!((beta - 1.0).abs() < 0.05, "{beta}");
    }
    assert!(pullback_spherical(&RationalMap::monomial(2).unwrap(), 2, 64).is_err());
}

#[test]
fn cubic_pullback_curvature() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let m = pullback_spherical(&g, 2, 64).unwrap();
    let dev = curvature(&m).unwrap().map_samples(|v| v - 3.0).unwrap().sup_abs();
    assert!(dev < 1e-6, "{dev}");
    assert!(m.chart_consistency().unwrap() < 1e-10);
    for cone in &m.cones {
        let beta = cone_exponent(&m, cone.part, cone.x, cone.y);
        assert!((beta - cone.beta).abs() < 0.05, "{beta} vs {}", cone.beta);
    }
}

#[test]
fn flat_cone_metrics() {
    let pair = [ConicalDatum { point: Some((0.0, 0.0)), order: 1 }, ConicalDatum { point: None, order: 1 }];
    let m = flat_conical(&pair, -2.0, 3.0, 64).unwrap();
    // C|z|^(−2)|dz|²
    let (x, y): (f64, f64) = (0.4, -0.3);
    let oracle = -0.5 * (3.0 / (x * x + y * y)).ln();
    assert!((m.factor.parts[0].value_at(x, y) - oracle).abs() < 1e-13);
    assert!(curvature(&m).unwrap().sup_abs() < 1e-10);
    assert!(m.chart_consistency().unwrap() < 1e-10);

    let pm = [ConicalDatum { point: Some((1.0, 0.0)), order: 1 }, ConicalDatum { point: Some((-1.0, 0.0)), order: 1 }];
    let m = flat_conical(&pm, -2.0, 1.0, 64).unwrap();
    assert!(curvature(&m).unwrap().sup_abs() < 1e-10);
    assert!(m.chart_consistency().unwrap() < 1e-10);
    for cone in &m.cones {
        let beta = cone_exponent(&m, cone.part, cone.x, cone.y);
        assert!((beta + 1.0).abs() < 0.05, "{beta}");
    }

    let dup = [ConicalDatum { point: Some((1.0, 0.0)), order: 1 }, ConicalDatum { point: Some((1.0, 0.0)), order: 1 }];
    assert!(matches!(flat_conical(&dup, -2.0, 1.0, 64), Err(Error::Precondition(_))));
    assert!(flat_conical(&pm, -4.0, 1.0, 64).is_err());
}

#[test]
fn flat_exponents_on_cubic_data() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let data = critical_data(&g).unwrap();
    let m = flat_conical(&data, -4.0, 1.0, 128).unwrap();
    assert!(curvature(&m).unwrap().sup_abs() < 1e-8);
    for cone in &m.cones {
        let beta = cone_exponent(&m, cone.part, cone.x, cone.y);
        assert!((beta - cone.beta).abs() < 0.05, "{beta} vs {}", cone.beta);
    }
}

#[test]
fn monomial_pipeline_matches_closed_form() {
    for ell in 1..=2u32 {
        let s = construct_sphere(&RationalMap::monomial(ell as usize + 1).unwrap(), 64).unwrap();
        let closed = sphere2_metric(Sphere2Params::new(ell, 0.0).unwrap(), 64).unwrap();
        let (_, spread) = factor_offset(&s.metric, &closed).unwrap();
        assert!(spread < 1e-6, "ℓ={ell}: {spread}");
        assert!(s.simplification_defect < 1e-8, "{}", s.simplification_defect);
    }
}

#[test]
fn cubic_pipeline_verifies() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let s = construct_sphere(&g, 256).unwrap();
    let r = verify(&s.metric, &RicciType::new(-4.0, 0.0, 0.0), 1.0).unwrap();
    assert!(r.verdict.pass, "{:?}", r.verdict);
    let mut orders: Vec<u32> = r.zeros.iter().map(|z| z.order).collect();
    orders.sort();
    assert_eq!(orders, vec![1, 1, 2]);
    assert!(r.identity_51.unwrap().abs() < 1e-4);
    assert!(curvature(&s.metric).unwrap().min_max().0 >= 0.0);
}

#[test]
fn mismatched_exponent_fails_extension() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let data = critical_data(&g).unwrap();
    let sph = pullback_spherical(&g, 2, 64).unwrap();
    let flat = flat_conical(&data, -4.0, 1.0, 64).unwrap();
    assert!(assemble_ricci_sphere(&sph, &flat, -4.0).is_ok());
    assert!(matches!(assemble_ricci_sphere(&sph, &flat, -3.0), Err(Error::Extension(_))));
    let other = flat_conical(&critical_data(&RationalMap::monomial(3).unwrap()).unwrap(), -4.0, 1.0, 64).unwrap();
    assert!(matches!(assemble_ricci_sphere(&sph, &other, -4.0), Err(Error::Precondition(_))));
}

#[test]
fn mobius_equivariance() {
    let g = RationalMap::polynomial(&[0.0, -3.0, 0.0, 1.0]).unwrap();
    let h = g.precompose_mobius([c(1.0), c(0.2), c(0.3), c(1.0)]).unwrap();
    assert_eq!(h.degree(), 3);
    let z = Complex64::new(0.3, -0.2);
    let mz = (z + 0.2) / (0.3 * z + 1.0);
    assert!((h.eval(z).unwrap() - g.eval(mz).unwrap()).norm() < 1e-12);
    let area = |m: &ConformalMetric| integrate(m, &ScalarField::constant(&m.charts(), 1.0)).unwrap();
    let kmax = |m: &ConformalMetric| max_curvature(m).unwrap();
    // the flat metrics agree only up to scale, so compare homothety invariants
    let (a, b) = (construct_sphere(&g, 256).unwrap(), construct_sphere(&h, 256).unwrap());
    let (ia, ib) = (kmax(&a.metric) * area(&a.metric), kmax(&b.metric) * area(&b.metric));
    assert!((ia - ib).abs() < 1e-8 * ia, "{ia} {ib}");
    let ty = RicciType::new(-4.0, 0.0, 0.0);
    let (ra, rb) = (verify(&a.metric, &ty, 1.0).unwrap(), verify(&b.metric, &ty, 1.0).unwrap());
    for r in [&ra, &rb] {
        assert!(r.residual_sup < 1e-6, "{}", r.residual_sup);
        assert_eq!(r.n, 4);
        assert!(r.identity_51.unwrap().abs() < 1e-4);
    }
    assert_eq!(sorted_orders(&a.data), sorted_orders(&b.data));
    // the spherical pullbacks are isometric outright: area 3·4π/3
    let (sa, sb) = (pullback_spherical(&g, 2, 512).unwrap(), pullback_spherical(&h, 2, 512).unwrap());
    assert!((area(&sa) - 4.0 * std::f64::consts::PI).abs() < 1e-3);
    assert!((area(&sa) - area(&sb)).abs() < 1e-3, "{} {}", area(&sa), area(&sb));
}


