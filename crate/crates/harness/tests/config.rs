use subnyq_harness::config::QuadratureRule;
use subnyq_harness::{ExperimentConfig, HarnessError, Scenario};

const CONFIGS: [&str; 6] = ["mwc_desk", "pns", "rd", "fri", "bounds_10ghz", "density"];

fn example(name: &str) -> ExperimentConfig {
    let path = format!("{}/configs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    ExperimentConfig::load(path.as_ref()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn config_error(text: &str) -> (String, String) {
    match ExperimentConfig::from_json(text) {
        Err(HarnessError::Config { path, message }) => (path, message),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn shipped_configs_load_and_round_trip() {
    for name in CONFIGS {
        let cfg = example(name);
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg, "{name}");
    }
}

#[test]
fn defaults_fill_in() {
    let cfg = ExperimentConfig::from_json(r#"{"scenario":"pns","model":{"f_lower":3.2,"f_upper":4.2}}"#).unwrap();
    assert_eq!((cfg.trials, cfg.seed, cfg.grid_density_factor), (1, 0, 10));
    let Scenario::Pns { model, sampler, recovery } = cfg.scenario else { panic!() };
    assert_eq!(model.fill, 0.8);
    assert_eq!(sampler.samples_per_channel, 64);
    assert_eq!(sampler.phase, None);
    assert_eq!(recovery.nmse_tol, 1e-6);

    let Scenario::Density { model } = example("density").scenario else { panic!() };
    assert_eq!(model.rule, QuadratureRule::GaussLegendre);
}

#[test]
fn schema_errors_carry_field_path() {
    let (path, _) = config_error(r#"{"scenario":"rd","model":{"tone_grid_size":"big","tones":5},"sampler":{"rate":128}}"#);
    assert_eq!(path, "model.tone_grid_size");
    let (path, message) = config_error(r#"{"scenario":"warp","model":{}}"#);
    assert_eq!(path, "scenario");
    assert!(message.contains("warp"), "{message}");
    let (path, _) = config_error(r#"{"scenario":"bounds","model":{"f_nyq":1,"bands":2},"sampler":{"channels":1,"f_s":1}}"#);
    assert_eq!(path, "model");
    let (path, message) = config_error(r#"{"scenario":"fri","model":{"pulses":2},"trails":5}"#);
    assert_eq!(path, "trails");
    assert!(message.contains("trails"), "{message}");
    let (path, _) = config_error(r#"{"scenario":"mwc","model":{"f_nyq":10,"bands":2,"band_width":0.1,"content":{"kind":"noise"}},"sampler":{"channels":4,"chips":21,"samples_per_channel":8}}"#);
    assert_eq!(path, "model.content.kind");
    let (path, _) = config_error(r#"{"scenario":"rd","model":{"tone_grid_size":512,"tones":5}}"#);
    assert_eq!(path, "sampler");
}

#[test]
fn validation_errors_carry_field_path() {
    let cases = [
        (r#"{"scenario":"rd","trials":0,"model":{"tone_grid_size":512,"tones":5},"sampler":{"rate":128}}"#, "trials"),
        (r#"{"scenario":"rd","model":{"tone_grid_size":512,"tones":5},"sampler":{"rate":100}}"#, "sampler.rate"),
        (r#"{"scenario":"rd","model":{"tone_grid_size":512,"tones":5,"mismatch":0.7},"sampler":{"rate":128}}"#, "model.mismatch"),
        (r#"{"scenario":"pns","model":{"f_lower":4,"f_upper":3}}"#, "model.f_upper"),
        (r#"{"scenario":"pns","model":{"f_lower":3,"f_upper":4},"sampler":{"phase":2.0}}"#, "sampler.phase"),
        (
            r#"{"scenario":"mwc","model":{"f_nyq":10,"bands":3,"band_width":0.1},"sampler":{"channels":4,"chips":21,"samples_per_channel":8}}"#,
            "model.bands",
        ),
        (
            r#"{"scenario":"mwc","model":{"f_nyq":10,"bands":2,"band_width":0.1},"sampler":{"channels":4,"chips":20,"samples_per_channel":8}}"#,
            "sampler.chips",
        ),
        (r#"{"scenario":"fri","model":{"pulses":0}}"#, "model.pulses"),
        (r#"{"scenario":"density","model":{"chips":9,"densities":[5,2]}}"#, "model.densities"),
        (r#"{"scenario":"bounds","model":{"f_nyq":1,"bands":2,"band_width":0.1},"sampler":{"channels":1,"f_s":0}}"#, "sampler.f_s"),
    ];
    for (text, want) in cases {
        let (path, _) = config_error(text);
        assert_eq!(path, want, "{text}");
    }
}

#[test]
fn missing_file_is_io_error() {
    let err = ExperimentConfig::load("/nonexistent/cfg.json".as_ref()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(!config_error("{").0.is_empty());
    assert_eq!(ExperimentConfig::from_json("{").unwrap_err().exit_code(), 1);
}
