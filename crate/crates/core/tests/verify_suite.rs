use rotovac_core::units::PhysicalConstants;
use rotovac_core::verify::{run, Mode};

#[test]
fn full_suite_passes_with_codata() {
    let r = run(Mode::Full, &PhysicalConstants::CODATA);
    assert!(r.ok, "{r}");
    assert!(r.checks.len() > run(Mode::Quick, &PhysicalConstants::CODATA).checks.len());
    for name in ["charged density band 5", "thermo L vs dE/dOmega", "E(L) discontinuity placement"] {
        assert!(r.checks.iter().any(|c| c.name == name), "{name} missing");
    }
}

#[test]
fn report_serializes() {
    let r = run(Mode::Quick, &PhysicalConstants::CODATA);
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["mode"], "quick");
    assert_eq!(v["checks"].as_array().unwrap().len(), r.checks.len());
}
