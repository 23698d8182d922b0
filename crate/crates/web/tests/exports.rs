use twisted_web::{ladder_json, laguerre_json, projection_json};

#[test]
fn laguerre_samples_start_at_the_binomial() {
    let v = laguerre_json(3, 2, 10.0, 50).unwrap();
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 4);
    // L_3^1(0) = C(4, 3)
    assert_eq!(v["samples"][0][1], 4.0);
    assert!(laguerre_json(3, 0, 10.0, 50).is_err());
}

#[test]
fn ladder_passes_on_the_whole_basis() {
    let v = ladder_json(2, 1, 1, 3, -1).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["status"] == "pass"));
    assert!(ladder_json(4, 1, 1, 3, 1).is_err());
}

#[test]
fn projection_matches_closed_form() {
    let same = projection_json(2, 2, 0.3, -0.4, 128).unwrap();
    assert!(same["error"].as_f64().unwrap() < 1e-8, "{same}");
    let other = projection_json(2, 3, 0.3, -0.4, 128).unwrap();
    assert!(other["error"].as_f64().unwrap() < 1e-8, "{other}");
}
