use nsf_lab::config::{ScenarioConfig, ScenarioKind, TimeGridConfig};
use nsf_lab::scenarios::blowup::horizon_times;
use nsf_lab::scenarios::longtime::gronwall_curve;
use nsf_lab::LabError;

const BASE: &str = r#"
scenario = "decomposition_check"
seed = 3
[grid]
n = 8
[time]
kind = "geometric"
first = 1e-3
horizon = 0.1
samples = 5
[initial]
kind = "single_mode"
mode = [1, 0, 0]
amplitude = [0.0, 0.1, 0.0]
"#;

#[test]
fn defaults_are_filled_in() {
    let cfg = ScenarioConfig::from_toml(BASE).unwrap();
    assert_eq!(cfg.scenario, ScenarioKind::DecompositionCheck);
    assert_eq!(cfg.p, 4.0);
    assert!((cfg.grid.box_length - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(cfg.solver().p, 4.0);
    assert_eq!(cfg.times().unwrap().len(), 5);
    assert!(cfg.force().y_norm.is_none());
}

#[test]
fn kato_scenarios_reject_uniform_grids() {
    let text = BASE.replace("kind = \"geometric\"\nfirst = 1e-3", "kind = \"uniform\"");
    let err = ScenarioConfig::from_toml(&text).unwrap_err();
    assert!(err.is_config(), "{err}");
    assert!(err.to_string().contains("geometric"));
}

#[test]
fn scenario_params_are_checked_up_front() {
    let bad = format!("{BASE}[params]\nlevels = [1]\n");
    assert!(matches!(
        ScenarioConfig::from_toml(&bad),
        Err(LabError::Config(_))
    ));
    let unknown = format!("{BASE}[params]\nlevel = [2]\n");
    assert!(ScenarioConfig::from_toml(&unknown).is_err());
    let ok = format!("{BASE}[params]\nlevels = [2, 3, 4]\n");
    assert!(ScenarioConfig::from_toml(&ok).is_ok());
}

#[test]
fn time_grids() {
    let u = TimeGridConfig::Uniform {
        horizon: 1.0,
        samples: 5,
    }
    .times()
    .unwrap();
    assert_eq!(u, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let g = TimeGridConfig::Geometric {
        first: 0.01,
        horizon: 1.0,
        samples: 4,
    }
    .times()
    .unwrap();
    assert_eq!(g[0], 0.0);
    assert!((g[1] - 0.01).abs() < 1e-15 && (g[3] - 1.0).abs() < 1e-15);
    assert!((g[2] - 0.1).abs() < 1e-12);
}

#[test]
fn horizons_end_at_the_last_sample() {
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    assert_eq!(horizon_times(&times, 3), vec![2.0, 4.0, 6.0]);
    assert_eq!(horizon_times(&times, 6), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert_eq!(horizon_times(&times, 1), vec![6.0]);
}

#[test]
fn gronwall_curve_starts_at_the_peak() {
    let times = [0.0, 1.0, 2.0, 4.0];
    let energy = [0.5, 2.0, 1.0, 0.5];
    let (i0, curve) = gronwall_curve(&times, &energy, 1.0);
    assert_eq!(i0, 1);
    assert_eq!(curve[0], None);
    assert_eq!(curve[1], Some(2.0));
    assert_eq!(curve[3], Some(8.0));
    // Peak at t = 0 moves to the first positive sample.
    let (i0, curve) = gronwall_curve(&times, &[3.0, 2.0, 1.0, 0.5], 0.0);
    assert_eq!(i0, 1);
    assert_eq!(curve[3], Some(2.0));
}
