use relaysel_core::harness::{ExperimentConfig, Strategy};
use relaysel_core::rl::{Checkpoint, RlAgent, RlHyperParams};
use relaysel_core::{substream, FieldLayout, Purpose};

#[test]
fn checkpoint_survives_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.json");
    let agent = RlAgent::new(8, RlHyperParams::default(), &mut substream(3, Purpose::Init, 0, 0)).unwrap();
    agent.to_checkpoint().save(&path).unwrap();
    let back = RlAgent::from_checkpoint(Checkpoint::load(&path).unwrap()).unwrap();
    assert_eq!(agent, back);
}

#[test]
fn layout_file_pins_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("layout.json");
    let placed = ExperimentConfig { seed: 77, ..ExperimentConfig::default() }.layout().unwrap();
    placed.save(&path).unwrap();
    assert_eq!(FieldLayout::load(&path).unwrap(), placed);

    let pinned = ExperimentConfig {
        layout_file: Some(path.clone()),
        seed: 1,
        ..ExperimentConfig::default()
    };
    assert_eq!(pinned.layout().unwrap(), placed);
    let wrong = ExperimentConfig { nodes: 5, layout_file: Some(path), ..ExperimentConfig::default() };
    assert!(wrong.layout().is_err());
}

#[test]
fn config_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let cfg = ExperimentConfig {
        strategy: Strategy::Random,
        ebno_grid: vec![-1.5, 3.25],
        frames: Some(12),
        ..ExperimentConfig::default()
    };
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
}
