use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{LossWeights, ModelConfig, OutputKind};
use crate::synthworld::{gen_world, WorldConfig};

fn small_model(seed: u64) -> ModelBundle {
    ModelBundle::new(ModelConfig {
        shared_widths: vec![16, 16],
        specific_widths: vec![16],
        decoder_widths: vec![16, 16],
        discriminator_widths: vec![16],
        init_seed: seed,
        ..ModelConfig::vector(8, 4, 2)
    })
    .unwrap()
}

fn vector_data(n: usize) -> TrainData {
    let w = gen_world(&WorldConfig::default(), 1).unwrap();
    TrainData::from_datasets(&Datasets::generate(&w, n, n, 2)).unwrap()
}

fn quick(steps: u64) -> TrainConfig {
    TrainConfig {
        steps,
        eval_every: 20,
        checkpoint_every: 20,
        eval_samples: 64,
        probe: ProbeConfig {
            steps: 30,
            ..ProbeConfig::default()
        },
        ..TrainConfig::default()
    }
}

#[test]
fn discriminator_step_writes_only_d() {
    let data = vector_data(64);
    let mut m = small_model(0);
    let before = m.clone();
    let mut opt = Optimizers::new(&m, &quick(1));
    step_discriminator(&mut m, &mut opt.d, data.a.view(), data.b.view()).unwrap();
    assert_eq!((&m.e1, &m.e2, &m.g), (&before.e1, &before.e2, &before.g));
    assert_ne!(m.d, before.d);
}

#[test]
fn generator_step_leaves_d_alone() {
    let data = vector_data(64);
    let mut m = small_model(1);
    let before = m.clone();
    let mut opt = Optimizers::new(&m, &quick(1));
    step_generator(&mut m, &mut opt, data.a.view(), data.b.view()).unwrap();
    assert_eq!(m.d, before.d);
    assert_ne!(m.e1, before.e1);
    assert_ne!(m.e2, before.e2);
    assert_ne!(m.g, before.g);
}

/// Frozen encoder, codes of the two domains far apart: the discriminator
/// alone drives `L_D` down.
#[test]
fn discriminator_learns_separable_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xa = Array2::from_shape_fn((64, 8), |_| rng.random_range(0.0..0.3));
    let xb = Array2::from_shape_fn((64, 8), |_| rng.random_range(0.7..1.0));
    let mut m = small_model(2);
    let cfg = TrainConfig {
        discriminator_lr: 1e-2,
        ..quick(1)
    };
    let mut opt = Optimizers::new(&m, &cfg);
    let first = m.loss_d(xa.view(), xb.view()).unwrap();
    for _ in 0..100 {
        step_discriminator(&mut m, &mut opt.d, xa.view(), xb.view()).unwrap();
    }
    let last = m.loss_d(xa.view(), xb.view()).unwrap();
    assert!(last < 0.5 * first, "{first} -> {last}");
}

/// Decoder with a zero last layer reproduces its bias exactly; on data
/// equal to that bias, with `λ = 0`, every gradient vanishes.
#[test]
fn generator_is_stationary_at_perfect_reconstruction() {
    let mut m = ModelBundle::new(ModelConfig {
        lambda: 0.0,
        decoder_output: OutputKind::Linear,
        ..ModelConfig::tiny()
    })
    .unwrap();
    let x = Array1::from(vec![0.1, 0.4, 0.2, 0.9, 0.5, 0.3]);
    let last = m.g.layers.last_mut().unwrap();
    last.w.fill(0.0);
    last.b.assign(&x);
    let batch = x.clone().insert_axis(Axis(0));
    let before = m.clone();
    let mut opt = Optimizers::new(&m, &quick(1));
    let l = step_generator(&mut m, &mut opt, batch.view(), batch.view()).unwrap();
    assert_eq!((l.l_a, l.l_b), (0.0, 0.0));
    for (a, b) in [(&m.e1, &before.e1), (&m.e2, &before.e2), (&m.g, &before.g)] {
        let dev = a.params().zip(b.params()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(dev <= 1e-8, "parameter moved by {dev}");
    }
}

/// When both domains feed the same codes, the discriminator's best
/// response is ½ everywhere: `L_D → 2 ln 2` and the confusion gradient on
/// `e1` vanishes.
#[test]
fn coinciding_codes_give_chance_discriminator() {
    let data = vector_data(128);
    let mut m = small_model(3);
    let cfg = TrainConfig {
        discriminator_lr: 5e-3,
        ..quick(1)
    };
    let mut opt = Optimizers::new(&m, &cfg);
    let x = data.b.view();
    for _ in 0..1500 {
        step_discriminator(&mut m, &mut opt.d, x, x).unwrap();
    }
    let ld = m.loss_d(x, x).unwrap();
    assert!((ld - 2.0 * std::f64::consts::LN_2).abs() < 1e-3, "L_D = {ld}");
    let w = LossWeights { a: 0.0, b: 0.0, d: 1.0 };
    let (_, g) = m.loss_gradients(x, x, w).unwrap();
    let norm = g.e1.params().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm < 1e-2, "e1 gradient norm {norm}");
}

#[test]
fn identical_runs_give_identical_reports() {
    let data = vector_data(200);
    let (_, r1) = train(&data, small_model(5), &quick(40)).unwrap();
    let (_, r2) = train(&data, small_model(5), &quick(40)).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(r1.iter().map(|r| r.step).collect::<Vec<_>>(), vec![0, 20, 40]);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let data = vector_data(200);
    let dir = tempfile::tempdir().unwrap();
    let files = RunFiles::new(dir.path()).unwrap();
    let mut full = Trainer::new(small_model(6), quick(60)).unwrap();
    full.run(&data, Some(&files)).unwrap();
    let metrics = fs::read_to_string(files.metrics()).unwrap();

    let ck = Checkpoint::load(&dir.path().join("checkpoint-00000040.json")).unwrap();
    assert_eq!(ck.model.step, 40);
    let mut resumed = Trainer::resume(ck, quick(60)).unwrap();
    resumed.run(&data, Some(&files)).unwrap();
    assert_eq!(resumed.model(), full.model());
    assert_eq!(resumed.reports(), full.reports());
    assert_eq!(fs::read_to_string(files.metrics()).unwrap(), metrics);

    let other = TrainConfig { batch_size: 32, ..quick(60) };
    let ck = Checkpoint::load(&files.latest()).unwrap();
    assert!(matches!(Trainer::resume(ck, other), Err(Error::CheckpointMismatch(_))));
}

#[test]
fn non_finite_loss_aborts_and_keeps_last_checkpoint() {
    let mut data = vector_data(100);
    let dir = tempfile::tempdir().unwrap();
    let files = RunFiles::new(dir.path()).unwrap();
    let mut t = Trainer::new(small_model(7), quick(20)).unwrap();
    t.run(&data, Some(&files)).unwrap();
    let saved = fs::read(files.latest()).unwrap();

    data.b.fill(f64::NAN);
    let mut t = Trainer::resume(Checkpoint::load(&files.latest()).unwrap(), quick(40)).unwrap();
    assert!(matches!(t.run(&data, Some(&files)), Err(Error::NonFiniteLoss { .. })));
    assert_eq!(fs::read(files.latest()).unwrap(), saved);
}

#[test]
fn empty_domains_are_rejected() {
    let empty = Array2::<f64>::zeros((0, 8));
    let one = Array2::<f64>::zeros((1, 8));
    assert!(matches!(TrainData::new(empty.clone(), one.clone()), Err(Error::EmptyDataset("A"))));
    assert!(matches!(TrainData::new(one, empty), Err(Error::EmptyDataset("B"))));
    assert!(TrainConfig { steps: 0, ..TrainConfig::default() }.validate().is_err());
    assert!(TrainConfig { generator_lr: 0.0, ..TrainConfig::default() }.validate().is_err());
}

#[test]
fn batches_are_a_function_of_seed_and_step() {
    let data = vector_data(50);
    let b1 = data.batch(Domain::A, 8, 3, 10, 0);
    assert_eq!(b1, data.batch(Domain::A, 8, 3, 10, 0));
    assert_ne!(b1, data.batch(Domain::A, 8, 3, 11, 0));
    assert_ne!(b1, data.batch(Domain::A, 8, 3, 10, 1));
}

/// Reconstruction falls on the default vector world with `λ = 0`.
#[test]
fn reconstruction_smoke_run() {
    let data = vector_data(2000);
    let mut m = ModelBundle::new(ModelConfig::default()).unwrap();
    m.config.lambda = 0.0;
    let cfg = TrainConfig {
        eval_every: 2000,
        ..quick(2000)
    };
    let mut t = Trainer::new(m, cfg).unwrap();
    let mut sums = vec![];
    while t.model().step < 2000 {
        let l = t.step(&data).unwrap();
        sums.push(l.l_a + l.l_b);
    }
    let r0 = report(&ModelBundle::new(ModelConfig { lambda: 0.0, ..ModelConfig::default() }).unwrap(), &data, t.config()).unwrap();
    let r1 = report(t.model(), &data, t.config()).unwrap();
    assert!(r1.l_a < 0.1 * r0.l_a, "L_A {} -> {}", r0.l_a, r1.l_a);
    assert!(r1.l_b < 0.1 * r0.l_b, "L_B {} -> {}", r0.l_b, r1.l_b);

    let median = |xs: &[f64]| {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let tenth = sums.len() / 10;
    assert!(median(&sums[sums.len() - tenth..]) < median(&sums[..tenth]));
}
