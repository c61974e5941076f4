use staticgeo::metric::{load_metric_table, log_ladder, resolve, schwarzschild, MetricTable};
use staticgeo::quantities::sphere_geometry;
use staticgeo::{GeoError, SchwarzschildParams};

/// Schwarzschild(3, 1) sampled on a log grid.
fn sampled(count: usize) -> MetricTable {
    let g = schwarzschild(SchwarzschildParams::new(3, 1.0).unwrap());
    let r = log_ladder(2.5, 200.0, count);
    MetricTable {
        n: 3,
        a: r.iter().map(|&x| g.a(x).v).collect(),
        b: r.iter().map(|&x| g.b(x).v).collect(),
        v: r.iter().map(|&x| g.potential(x).v).collect(),
        r,
    }
}

#[test]
fn tabulated_schwarzschild_converges_to_the_closed_form() {
    let exact = schwarzschild(SchwarzschildParams::new(3, 1.0).unwrap());
    let errs: Vec<f64> = [200, 400]
        .iter()
        .map(|&k| {
            let g = sampled(k).into_metric("table").unwrap();
            let (s, e) = (sphere_geometry(&g, 7.3).unwrap(), sphere_geometry(&exact, 7.3).unwrap());
            (s.h - e.h).abs().max((s.dv_dnu - e.dv_dnu).abs())
        })
        .collect();
    assert!(errs[1] < 1e-6, "{errs:?}");
    assert!(errs[0] / errs[1] > 7.0, "{errs:?}");
    let g = sampled(400).into_metric("table").unwrap();
    assert!((g.adm_mass(20.0).unwrap() - 1.0).abs() < 1e-5);
    assert!(g.static_residual(10.0).unwrap().max_abs() < 1e-4);
}

#[test]
fn tables_load_from_json_files() {
    let dir = std::env::temp_dir().join(format!("staticgeo-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sch.json");
    std::fs::write(&path, serde_json::to_string(&sampled(100)).unwrap()).unwrap();
    let g = load_metric_table(&path).unwrap();
    assert_eq!(g.dim().get(), 3);
    let via_label = resolve(&format!("file:{}", path.display()), 3, 0.0).unwrap();
    assert_eq!(via_label.a(5.0), g.a(5.0));

    std::fs::write(&path, r#"{"n": 3, "r": [1, 2, 2], "a": [1, 1, 1], "b": [1, 2, 3], "V": [1, 1, 1]}"#).unwrap();
    assert!(matches!(load_metric_table(&path), Err(GeoError::Table(_))));
    std::fs::write(&path, r#"{"n": 3, "r": [1, 2, 3]}"#).unwrap();
    assert!(matches!(load_metric_table(&path), Err(GeoError::Json(_))));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unknown_labels_are_rejected() {
    assert!(matches!(resolve("kerr", 3, 1.0), Err(GeoError::Parameter(_))));
    assert!(matches!(resolve("schwarzschild", 9, 1.0), Err(GeoError::Dimension(9))));
}
