// End-to-end: world → files on disk → training with checkpoints → resume → evaluation.

use latentswap::evaluate::{evaluate, EvalConfig, Oracle};
use latentswap::synthworld::{gen_world, read_dataset, write_dataset, Datasets};
use latentswap::trainer::{Checkpoint, RunFiles, TrainData, Trainer};
use latentswap::{ModelBundle, ModelConfig, TrainConfig, WorldConfig};

fn short(steps: u64) -> TrainConfig {
    TrainConfig {
        steps,
        batch_size: 16,
        checkpoint_every: 20,
        eval_every: 20,
        eval_samples: 32,
        ..TrainConfig::default()
    }
}

fn small_model() -> ModelConfig {
    ModelConfig {
        shared_widths: vec![16, 16],
        specific_widths: vec![16, 16],
        decoder_widths: vec![16, 16],
        discriminator_widths: vec![16],
        ..ModelConfig::default()
    }
}

#[test]
fn dataset_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let world = gen_world(&WorldConfig::default(), 3).unwrap();
    let data = Datasets::generate(&world, 40, 30, 3);
    write_dataset(dir.path(), &world, &data, Some("abc")).unwrap();
    let (w2, d2) = read_dataset(dir.path()).unwrap();
    assert_eq!(w2.config(), world.config());
    assert_eq!(d2, data);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let world = gen_world(&WorldConfig::default(), 1).unwrap();
    let data = TrainData::from_datasets(&Datasets::generate(&world, 200, 200, 1)).unwrap();
    let model = ModelBundle::new(small_model()).unwrap();

    let mut straight = Trainer::new(model.clone(), short(60)).unwrap();
    straight.run(&data, None).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let files = RunFiles::new(dir.path()).unwrap().stamped("h");
    let mut first = Trainer::new(model, short(40)).unwrap();
    first.run(&data, Some(&files)).unwrap();
    let ck = Checkpoint::load(&files.latest()).unwrap();
    assert_eq!(ck.model.step, 40);
    assert_eq!(ck.config_hash.as_deref(), Some("h"));
    let mut resumed = Trainer::resume(ck, short(60)).unwrap();
    resumed.run(&data, None).unwrap();

    assert_eq!(resumed.model().to_json().unwrap(), straight.model().to_json().unwrap());
    assert_eq!(resumed.reports().last(), straight.reports().last());
}

#[test]
fn trained_model_and_oracle_evaluate_sensibly() {
    let world = gen_world(&WorldConfig::default(), 2).unwrap();
    let data = Datasets::generate(&world, 300, 300, 2);
    let cfg = EvalConfig {
        n_samples: 100,
        classifier_samples: 200,
        ..EvalConfig::default()
    };
    let ideal = evaluate(&Oracle(&world), &world, &data, &cfg).unwrap();
    assert!(ideal.guided_risk < 1e-12);
    assert!(ideal.spec_fidelity < 1e-6 && ideal.content_fidelity < 1e-6);

    let mut t = Trainer::new(ModelBundle::new(small_model()).unwrap(), short(100)).unwrap();
    t.run(&TrainData::from_datasets(&data).unwrap(), None).unwrap();
    let r = evaluate(t.model(), &world, &data, &cfg).unwrap();
    for v in [r.guided_risk, r.spec_fidelity, r.content_fidelity, r.removal_prob_b, r.probe_accuracy] {
        assert!(v.is_finite());
    }
    assert!(r.guided_risk > ideal.guided_risk);
    assert!((0.0..=1.0).contains(&r.removal_prob_b));
}
