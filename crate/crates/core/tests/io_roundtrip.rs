use proptest::prelude::*;

use repfrechet::io::{encode, load_dataset, parse_dataset, save_dataset, to_json, LoadOptions};
use repfrechet::simgen::{generate, GroupParams, RSpec, ScenarioConfig, ScenarioKind};

fn small(kind: ScenarioKind, seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(kind);
    cfg.n1 = 4;
    cfg.n2 = 3;
    cfg.grid_size = 20;
    cfg.nodes = 5;
    cfg.seed = seed;
    cfg.group1 = GroupParams {
        r: RSpec::Uniform123,
        ..GroupParams::default()
    };
    cfg.group2 = cfg.group1;
    cfg
}

#[test]
fn every_kind_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [
        ScenarioKind::Distributional,
        ScenarioKind::Network,
        ScenarioKind::Vector,
        ScenarioKind::Composite,
    ] {
        let ds = generate(&small(kind, 5), 0).unwrap();
        let path = dir.path().join(format!("{}.json", kind.name()));
        save_dataset(&ds, &path).unwrap();
        let back = load_dataset(&path, LoadOptions::default()).unwrap();
        assert_eq!(back, ds, "{}", kind.name());
        let again = to_json(&encode(&back).unwrap()).unwrap();
        assert_eq!(again, std::fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn precomputed_round_trips() {
    let ds = generate(&small(ScenarioKind::Vector, 2), 0)
        .unwrap()
        .to_precomputed()
        .unwrap();
    let text = to_json(&encode(&ds).unwrap()).unwrap();
    let back = parse_dataset(&text, LoadOptions::default()).unwrap();
    assert_eq!(back, ds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn generated_datasets_round_trip(seed in 0u64..1000, replicate in 0u64..50) {
        let ds = generate(&small(ScenarioKind::Composite, seed), replicate).unwrap();
        let text = to_json(&encode(&ds).unwrap()).unwrap();
        prop_assert_eq!(parse_dataset(&text, LoadOptions::default()).unwrap(), ds);
    }
}
