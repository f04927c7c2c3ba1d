use boussinesq::experiment::ExperimentConfig;
use boussinesq::noise::DiffusionFamily;
use boussinesq::scheme::DEFAULT_PICARD_TOL;
use boussinesq::Error;

const MINIMAL: &str = r#"
[scheme]
modes = 32
nu = 0.1
kappa = 0.2
horizon = 1.0

[noise.velocity]
diffusion = { preset = "mode_projection", sigma = 0.5 }

[noise.temperature]
diffusion = { preset = "additive", sigma = 0.5 }

[initial]
kind = "gaussian"
velocity_scale = 1.0
temperature_scale = 1.0

[campaign]
ladder = [16, 32]
reference = 64
"#;

fn config_message(text: &str) -> String {
    match ExperimentConfig::parse(text) {
        Err(Error::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_document_fills_defaults() {
    let c = ExperimentConfig::parse(MINIMAL).unwrap();
    assert_eq!(c.scheme.picard_tol, DEFAULT_PICARD_TOL);
    assert_eq!(c.scheme.picard_tol, 1e-10);
    assert_eq!(c.scheme.length, 2.0 * std::f64::consts::PI);
    assert_eq!(c.scheme.cutoff, Some(10));
    assert!(!c.scheme.linear);
    assert_eq!(c.campaign.paths, 1);
    assert_eq!(c.campaign.eta, 0.8);
    assert_eq!(c.campaign.moment_orders, vec![2, 4, 8]);
    assert_eq!(c.lags(), vec![1, 2, 4]);
    assert!(matches!(
        c.velocity_noise.diffusion.coefficient,
        DiffusionFamily::LinearModeScaled { .. }
    ));
    assert_eq!(
        c.temperature_noise.diffusion.coefficient,
        DiffusionFamily::Additive { sigma: 0.5 }
    );
}

#[test]
fn non_dividing_ladder_names_both_values() {
    let text = MINIMAL.replace("ladder = [16, 32]", "ladder = [48]");
    let m = config_message(&text);
    assert!(m.contains("48") && m.contains("64"), "{m}");
    assert!(m.contains("campaign.ladder"), "{m}");
}

#[test]
fn unknown_key_is_rejected() {
    let text = MINIMAL.replace("nu = 0.1", "nu = 0.1\nviscosity = 0.1");
    let m = config_message(&text);
    assert!(m.contains("viscosity"), "{m}");
}

#[test]
fn custom_coefficient_needs_declared_constants() {
    let text = MINIMAL.replace(
        r#"diffusion = { preset = "additive", sigma = 0.5 }"#,
        r#"diffusion = { coefficient = { family = "additive", sigma = 0.5 } }"#,
    );
    let m = config_message(&text);
    assert!(m.contains("noise.temperature.diffusion.constants"), "{m}");

    let declared = MINIMAL.replace(
        r#"diffusion = { preset = "additive", sigma = 0.5 }"#,
        r#"diffusion = { coefficient = { family = "additive", sigma = 0.5 }, constants = { k0 = 0.25, k1 = 0.0, k2 = 25.0, k3 = 0.0, l1 = 0.0 } }"#,
    );
    ExperimentConfig::parse(&declared).unwrap();
}

#[test]
fn preset_without_sigma_is_rejected() {
    let text = MINIMAL.replace(r#"preset = "additive", sigma = 0.5"#, r#"preset = "additive""#);
    assert!(config_message(&text).contains("sigma"));
}

#[test]
fn unknown_preset_is_rejected() {
    let text = MINIMAL.replace(r#"preset = "additive""#, r#"preset = "gentle""#);
    assert!(config_message(&text).contains("gentle"));
}

#[test]
fn round_trip_through_toml_is_exact() {
    let mut text = MINIMAL.replace("nu = 0.1", "nu = 0.1\nlength = 3.0");
    text.push_str("threshold = 12.5\nlags = [1, 4]\n");
    let c = ExperimentConfig::parse(&text).unwrap();
    let again = ExperimentConfig::parse(&c.to_toml().unwrap()).unwrap();
    assert_eq!(c, again);
}

#[test]
fn bad_physical_parameters_are_rejected() {
    for (from, to) in [
        ("nu = 0.1", "nu = -0.1"),
        ("horizon = 1.0", "horizon = 0.0"),
        ("modes = 32", "modes = 2"),
    ] {
        let text = MINIMAL.replace(from, to);
        assert!(ExperimentConfig::parse(&text).is_err(), "{to} accepted");
    }
}

#[test]
fn shipped_example_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 2);
}
