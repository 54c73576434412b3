use ndarray::{array, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn rand_batch(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |_| rng.random_range(0.05..0.95))
}

fn tiny(seed: u64) -> ModelBundle {
    ModelBundle::new(ModelConfig {
        init_seed: seed,
        ..ModelConfig::tiny()
    })
    .unwrap()
}

#[test]
fn l1_mean_closed_form() {
    let x = array![[0.1, 0.2, 0.3, 0.4]];
    let out = array![[0.6, 0.2, 0.8, 0.4]];
    assert!((l1_rows(&out, x.view()) - 1.0).abs() < 1e-15);
    let out = array![[0.1, 0.2, 0.3, 0.4 + 0.25]];
    assert!((l1_rows(&out, x.view()) - 0.25).abs() < 1e-15);
}

#[test]
fn confusion_loss_at_one_half_is_two_ln_two() {
    let mut m = tiny(1);
    for l in m.d.layers.last_mut().into_iter() {
        l.w.fill(0.0);
        l.b.fill(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (xa, xb) = (rand_batch(&mut rng, 5, 6), rand_batch(&mut rng, 7, 6));
    let ld = m.loss_d(xa.view(), xb.view()).unwrap();
    assert!((ld - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
    // perfect reconstruction and d ≡ ½ give −λ·2 ln 2
    let l = Losses { l_a: 0.0, l_b: 0.0, l_d: ld };
    assert!((l.generator(0.01) + 0.02 * std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn saturated_discriminator_has_near_zero_loss_and_zero_gradient() {
    let (la, ga) = bce(&array![[-50.0], [-60.0]], 0.0);
    let (lb, gb) = bce(&array![[50.0], [70.0]], 1.0);
    assert!(la + lb < 3e-6);
    assert!(ga.iter().chain(gb.iter()).all(|&g| g == 0.0));
}

#[test]
fn swapping_batches_changes_confusion_loss() {
    let m = tiny(2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (xa, xb) = (rand_batch(&mut rng, 8, 6), rand_batch(&mut rng, 8, 6));
    let l1 = m.loss_d(xa.view(), xb.view()).unwrap();
    let l2 = m.loss_d(xb.view(), xa.view()).unwrap();
    assert!((l1 - l2).abs() > 1e-6, "{l1} vs {l2}");
}

#[test]
fn losses_reject_empty_batches() {
    let m = tiny(0);
    let empty = Array2::<f64>::zeros((0, 6));
    let one = Array2::<f64>::zeros((1, 6));
    assert!(matches!(m.loss_a(empty.view()), Err(Error::EmptyBatch(_))));
    assert!(matches!(m.loss_d(one.view(), empty.view()), Err(Error::EmptyBatch(_))));
}

#[test]
fn loss_is_invariant_to_batch_order() {
    let m = tiny(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = rand_batch(&mut rng, 6, 6);
    let mut rev = x.clone();
    rev.invert_axis(Axis(0));
    assert!((m.loss_a(x.view()).unwrap() - m.loss_a(rev.view()).unwrap()).abs() < 1e-14);
    assert!((m.loss_b(x.view()).unwrap() - m.loss_b(rev.view()).unwrap()).abs() < 1e-14);
}

#[test]
fn zero_lambda_objective_is_plain_reconstruction() {
    let mut m = tiny(4);
    m.config.lambda = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (xa, xb) = (rand_batch(&mut rng, 4, 6), rand_batch(&mut rng, 4, 6));
    let (gen, disc) = m.objective(xa.view(), xb.view()).unwrap();
    let sum = m.loss_a(xa.view()).unwrap() + m.loss_b(xb.view()).unwrap();
    assert_eq!(gen, sum);
    assert_eq!(disc, m.loss_d(xa.view(), xb.view()).unwrap());
}

/// Analytic gradients of each loss and of the generator objective agree
/// with central differences at ten random parameter points.
#[test]
fn gradients_match_finite_differences() {
    let cases = [
        ("L_A", LossWeights { a: 1.0, b: 0.0, d: 0.0 }),
        ("L_B", LossWeights { a: 0.0, b: 1.0, d: 0.0 }),
        ("L_D", LossWeights { a: 0.0, b: 0.0, d: 1.0 }),
        ("generator", LossWeights { a: 1.0, b: 1.0, d: -0.01 }),
    ];
    for point in 0..10u64 {
        let m = tiny(100 + point);
        let mut rng = ChaCha8Rng::seed_from_u64(point);
        let (xa, xb) = (rand_batch(&mut rng, 5, 6), rand_batch(&mut rng, 5, 6));
        for (name, w) in cases {
            let err = gradient_error(&m, xa.view(), xb.view(), w).unwrap();
            assert!(err < 1e-4, "{name} at point {point}: relative error {err}");
        }
    }
}

#[test]
fn discriminator_gradients_touch_only_d() {
    let m = tiny(5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (xa, xb) = (rand_batch(&mut rng, 4, 6), rand_batch(&mut rng, 4, 6));
    let (ld, gd) = m.discriminator_gradients(xa.view(), xb.view()).unwrap();
    let (_, full) = m.loss_gradients(xa.view(), xb.view(), LossWeights { a: 0.0, b: 0.0, d: 1.0 }).unwrap();
    assert_eq!(ld, m.loss_d(xa.view(), xb.view()).unwrap());
    assert_eq!(gd, full.d);
}

#[test]
fn translate_uses_codes_only() {
    let m = tiny(6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = rand_batch(&mut rng, 3, 6);
    let (a, b1, b2) = (x.row(0).to_vec(), x.row(1).to_vec(), x.row(2).to_vec());
    let direct = m.translate(&a, &b1).unwrap();
    let code = LatentCode {
        shared: m.encode_shared(&a).unwrap(),
        specific: m.encode_specific(&b1).unwrap(),
    };
    assert_eq!(direct, m.decode(&code).unwrap());
    assert_eq!(m.encode_shared(&a).unwrap().len(), 3);
    assert_eq!(m.encode_specific(&a).unwrap().len(), 2);
    // the shared code of translate(a, ·) does not depend on the guide
    let _ = m.translate(&a, &b2).unwrap();
    assert_eq!(code.shared, m.encode_shared(&a).unwrap());
    // translate(b, b) is the L_B reconstruction path
    let rec = m.translate_batch(x.slice(s![1..2, ..]), x.slice(s![1..2, ..])).unwrap();
    assert_eq!(m.translate(&b1, &b1).unwrap(), rec.row(0).to_vec());
}

#[test]
fn remove_is_the_zero_padded_path() {
    let m = tiny(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = rand_batch(&mut rng, 4, 6);
    for i in 0..4 {
        let xi = x.row(i).to_vec();
        let code = LatentCode {
            shared: m.encode_shared(&xi).unwrap(),
            specific: vec![0.0; 2],
        };
        let r = m.remove(&xi).unwrap();
        assert_eq!(r, m.decode(&code).unwrap());
        let single = m.remove_batch(x.slice(s![i..i + 1, ..])).unwrap();
        assert_eq!(r, single.row(0).to_vec());
    }
}

#[test]
fn interpolation_endpoints_are_exact() {
    let m = tiny(8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = rand_batch(&mut rng, 3, 6);
    let (a, b1, b2) = (x.row(0).to_vec(), x.row(1).to_vec(), x.row(2).to_vec());
    assert_eq!(m.interpolate(&a, &b1, &b2, 0.0).unwrap(), m.translate(&a, &b1).unwrap());
    assert_eq!(m.interpolate(&a, &b1, &b2, 1.0).unwrap(), m.translate(&a, &b2).unwrap());
    assert!(matches!(m.interpolate(&a, &b1, &b2, 1.5), Err(Error::OutOfRange(_))));
}

#[test]
fn shape_errors() {
    let m = tiny(0);
    assert!(matches!(m.encode_shared(&[0.0; 5]), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(m.discriminate(&[0.0; 2]), Err(Error::DimensionMismatch { .. })));
    let bad = LatentCode {
        shared: vec![0.0; 3],
        specific: vec![0.0; 3],
    };
    assert!(m.decode(&bad).is_err());
}

#[test]
fn config_validation() {
    assert!(ModelBundle::new(ModelConfig {
        lambda: -1.0,
        ..ModelConfig::tiny()
    })
    .is_err());
    assert!(ModelBundle::new(ModelConfig {
        leaky_slope: 1.0,
        ..ModelConfig::tiny()
    })
    .is_err());
    assert!(ModelBundle::new(ModelConfig {
        specific_dim: 0,
        ..ModelConfig::tiny()
    })
    .is_err());
}

#[test]
fn lognormal_factors_have_unit_mean_and_known_variance() {
    let noise = NoiseConfig::new(0.5).unwrap();
    let dist = noise.distribution();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    let want = 0.5f64.exp() - 1.0;
    assert!((var - want).abs() < 0.05 * want, "variance {var} vs {want}");
}

#[test]
fn perturbation_touches_encoder_weights_only() {
    let m = tiny(10);
    let p = m.perturb_weights(&NoiseConfig { alpha: 0.3 }, 1).unwrap();
    assert_eq!(p.g, m.g);
    assert_eq!(p.d, m.d);
    assert_ne!(p.e1, m.e1);
    for (l, k) in p.e2.layers.iter().zip(&m.e2.layers) {
        assert_eq!(l.b, k.b);
        assert_ne!(l.w, k.w);
    }
    assert_eq!(p, m.perturb_weights(&NoiseConfig { alpha: 0.3 }, 1).unwrap());
    assert!(m.perturb_weights(&NoiseConfig { alpha: 0.0 }, 1).is_err());
    assert!(NoiseConfig::new(-1.0).is_err());

    let small = m.perturb_weights(&NoiseConfig { alpha: 1e-6 }, 2).unwrap();
    let dev = small
        .e1
        .params()
        .zip(m.e1.params())
        .filter(|(_, b)| **b != 0.0)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-2, "max relative deviation {dev}");
}

#[test]
fn checkpoint_roundtrip_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let mut m = tiny(11);
    m.step = 17;
    m.save(&path).unwrap();
    let back = ModelBundle::load(&path).unwrap();
    assert_eq!(back, m);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let probe = rand_batch(&mut rng, 5, 6);
    assert_eq!(
        back.translate_batch(probe.view(), probe.view()).unwrap(),
        m.translate_batch(probe.view(), probe.view()).unwrap()
    );
    let other = ModelConfig {
        specific_dim: 3,
        ..ModelConfig::tiny()
    };
    assert!(matches!(
        ModelBundle::load_expecting(&path, &other),
        Err(Error::CheckpointMismatch(_))
    ));
    // a config edited on disk without matching tensors is refused
    let text = std::fs::read_to_string(&path).unwrap().replace("\"specific_dim\":2", "\"specific_dim\":3");
    assert!(matches!(
        ModelBundle::from_json(&text, &path),
        Err(Error::CheckpointMismatch(_))
    ));
}

#[test]
fn untrained_outputs_are_finite_and_in_range() {
    let m = ModelBundle::new(ModelConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x = rand_batch(&mut rng, 16, 8);
    let out = m.translate_batch(x.view(), x.view()).unwrap();
    assert!(out.iter().all(|v| v.is_finite() && *v > 0.0 && *v < 1.0));
    assert_eq!(out, m.translate_batch(x.view(), x.view()).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discriminator_output_is_a_probability(code in prop::collection::vec(-1e3f64..1e3, 3), seed in 0u64..8) {
        let p = tiny(seed).discriminate(&code).unwrap();
        prop_assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn losses_are_nonnegative(seed in 0u64..1000, na in 1usize..6, nb in 1usize..6) {
        let m = tiny(seed % 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (xa, xb) = (rand_batch(&mut rng, na, 6), rand_batch(&mut rng, nb, 6));
        let l = m.losses(xa.view(), xb.view()).unwrap();
        prop_assert!(l.l_a >= 0.0 && l.l_b >= 0.0 && l.l_d >= 0.0);
    }
}
