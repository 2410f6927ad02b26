use super::*;
use crate::geom::standard::flat_torus;

fn cfg(text: &str) -> RunConfig {
    RunConfig::from_json(text).unwrap()
}

#[test]
fn schema_rejects_unknown_and_missing_keys() {
    assert!(RunConfig::from_json(r#"{"command":"classify","type":{"a":6,"b":-3,"c":1},"colour":1}"#).is_err());
    assert!(RunConfig::from_json(r#"{"command":"verify","family":{"kind":"sphere2","ell":1,"rho":2}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"command":"classify","type":{"a":6,"b":-3,"c":1,"d":0}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"command":"verify"}"#).is_err());
    assert!(RunConfig::from_json(r#"{"command":"transform","family":{"kind":"sphere2","ell":1}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"command":"launch"}"#).is_err());
    let e = RunConfig::from_json(r#"{"command":"classify","type":{"a":6,"b":-3,"c":1},"fields":["H"]}"#).unwrap_err();
    assert!(format!("{e:#}").contains("available: f, K, residual"));
    let c = cfg(r#"{"command":"verify","family":{"kind":"delaunay","a":4,"c":1},"resolution":32}"#);
    assert_eq!(c.family.unwrap().natural_type(), Some(RicciType::new(4.0, 0.0, 1.0)));
}

#[test]
fn classify_a2() {
    let o = execute(&cfg(r#"{"command":"classify","type":{"a":6,"b":-3,"c":1}}"#)).unwrap();
    assert!(o.pass);
    assert_eq!(o.report["classification"]["label"], "A2");
    assert!(o.summary.contains("A2"));
}

#[test]
fn verify_sphere2_reports_two_zeros() {
    let o = execute(&cfg(r#"{"command":"verify","family":{"kind":"sphere2","ell":1,"tau":0},"resolution":128}"#)).unwrap();
    assert!(o.pass, "{}", o.summary);
    assert_eq!(o.report["verification"]["N"], 2);
    assert!(o.report["verification"]["residual_sup"].as_f64().unwrap() < 1e-6);
    assert_eq!(o.exit_code(), 0);
    assert!(o.summary.contains("PASS ricci_residual"));
}

#[test]
fn flat_torus_fails_non_flat_claim() {
    let text = r#"{"command":"verify","family":{"kind":"flat_torus","g1":[1,0],"g2":[0,1]},
        "type":{"a":4,"b":0,"c":1},"non_constant":true,"resolution":32}"#;
    let o = execute(&cfg(text)).unwrap();
    assert!(!o.pass);
    assert_eq!(o.exit_code(), 2);
    let reasons = o.report["verification"]["verdict"]["reasons"].to_string();
    assert!(reasons.contains("non-flat metric requires a > 0 and K < c"), "{reasons}");
    // without the claim the flat torus is a legitimate (4, 0, 1) metric
    let o = execute(&cfg(&text.replace(r#""non_constant":true,"#, ""))).unwrap();
    assert!(o.pass, "{}", o.summary);
}

#[test]
fn render_lines() {
    let ty = RicciType::new(-2.0, 0.0, 0.0);
    let m = sphere2_metric(Sphere2Params::new(1, 0.0).unwrap(), 64).unwrap();
    let bad = verify(&m.perturbed(1e-2, (0.3, 0.2), 0.2), &ty, 1.0).unwrap();
    let text = report_render(&bad);
    assert!(text.contains("FAIL ricci_residual sup="), "{text}");
    assert!(text.contains(" tol=1.0e-5"), "{text}");
    let flat = flat_torus(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), 16).unwrap();
    let t = report_render(&verify(&flat, &RicciType::new(3.0, 0.0, 0.0), 1.0).unwrap());
    assert_eq!(t.lines().next().unwrap(), format!("PASS {TRIVIAL_TEXT}"));
}

#[test]
fn plot_data() {
    let m = sphere2_metric(Sphere2Params::new(1, 0.0).unwrap(), 16).unwrap();
    let ty = RicciType::new(-2.0, 0.0, 0.0);
    let all: Vec<String> = FIELD_NAMES.iter().map(|s| s.to_string()).collect();
    let csv = emit_plot_data(&m, Some(&ty), &all).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "chart,x,y,f,K,residual");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 16 * 16);
    assert!(rows.iter().any(|r| r.starts_with("sphere_w,")));
    for r in &rows {
        assert!(r.split(',').skip(1).all(|v| v.parse::<f64>().unwrap().is_finite()), "{r}");
    }
    match emit_plot_data(&m, None, &all) {
        Err(Error::UnknownField { requested, available }) => {
            assert_eq!(requested, "residual");
            assert_eq!(available, "f, K");
        }
        other => panic!("{other:?}"),
    }
    let t = execute(&cfg(r#"{"command":"construct","family":{"kind":"delaunay","a":4,"c":1},"resolution":16,"fields":["f"]}"#))
        .unwrap();
    let csv = t.csv.unwrap();
    assert!(csv.starts_with("chart,x,y,f\ntorus,"));
    assert_eq!(csv.lines().count(), 16 * 16 + 1);
}

#[test]
fn reports_are_deterministic() {
    let c = cfg(r#"{"command":"verify","family":{"kind":"delaunay","a":4,"c":1},"resolution":32}"#);
    let a = serde_json::to_string_pretty(&execute(&c).unwrap().report).unwrap();
    let b = serde_json::to_string_pretty(&execute(&c).unwrap().report).unwrap();
    assert_eq!(a, b);
}

#[test]
fn transform_to_flat() {
    let o = execute(&cfg(r#"{"command":"transform","family":{"kind":"sphere2","ell":1},"gamma":-1,"resolution":32}"#)).unwrap();
    assert!(o.pass, "{}", o.summary);
    assert_eq!(o.report["predicts_flat"], true);
}

#[test]
fn solve_torus_commands() {
    let o = execute(&cfg(
        r#"{"command":"solve-torus","family":{"kind":"delaunay","a":4,"c":1},
            "solver":{"method":"newton","perturbation":0.01},"resolution":96}"#,
    ))
    .unwrap();
    assert!(o.pass, "{}", o.summary);
    assert!(o.report["residual"].as_f64().unwrap() < 1e-8);
    let o = execute(&cfg(
        r#"{"command":"solve-torus","solver":{"method":"monotone","g_mean":2,"g_amplitude":0.5},"resolution":24}"#,
    ))
    .unwrap();
    assert!(o.pass, "{}", o.summary);
    assert_eq!(o.report["sandwich_defect"], 0.0);
    assert!(execute(&cfg(r#"{"command":"solve-torus","solver":{"method":"monotone","g_mean":1,"g_amplitude":2}}"#)).is_err());
}
