use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::ModelConfig;
use crate::synthworld::{gen_world, ContentParams, SpecParams, WorldConfig};

fn vector_world() -> World {
    gen_world(&WorldConfig::default(), 5).unwrap()
}

fn image_world() -> World {
    gen_world(&WorldConfig::image(), 5).unwrap()
}

/// Emits the same vector whatever the inputs.
struct Constant(Vec<f64>);

impl Translator for Constant {
    fn translate(&self, _: &Sample, _: &Sample) -> Result<Vec<f64>> {
        Ok(self.0.clone())
    }
    fn remove(&self, _: &Sample) -> Result<Vec<f64>> {
        Ok(self.0.clone())
    }
    fn shared_code(&self, _: &Sample) -> Result<Vec<f64>> {
        Ok(vec![0.0])
    }
}

/// The oracle with uniform noise in `[−eps, eps]` on every output value.
struct Noisy<'w> {
    inner: Oracle<'w>,
    eps: f64,
    seed: u64,
}

impl Translator for Noisy<'_> {
    fn translate(&self, a: &Sample, b: &Sample) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ a.data[0].to_bits() ^ b.data[1].to_bits());
        Ok(self
            .inner
            .translate(a, b)?
            .into_iter()
            .map(|v| v + rng.random_range(-self.eps..=self.eps))
            .collect())
    }
    fn remove(&self, b: &Sample) -> Result<Vec<f64>> {
        self.inner.remove(b)
    }
    fn shared_code(&self, x: &Sample) -> Result<Vec<f64>> {
        self.inner.shared_code(x)
    }
}

#[test]
fn oracle_scores_exactly_zero() {
    for w in [vector_world(), image_world()] {
        let o = Oracle(&w);
        assert_eq!(guided_risk(&o, &w, 200, 1).unwrap(), 0.0);
        let f = fidelity(&o, &w, 200, 1, 0.25).unwrap();
        assert_eq!((f.spec, f.content, f.excluded), (0.0, 0.0, 0));
        assert!(f.spec_components.iter().chain(&f.content_components).all(|&v| v == 0.0));
        assert_eq!(f.content_components.len(), w.content_dim());
    }
}

#[test]
fn untrained_model_sits_in_the_sanity_band() {
    let w = vector_world();
    let m = ModelBundle::new(ModelConfig::default()).unwrap();
    let r = guided_risk(&m, &w, 300, 2).unwrap();
    assert!((0.05..=1.0).contains(&r), "{r}");
}

/// A constant output decodes to fixed content 0.5, so the content error is
/// `E|U − ½| = ¼` under the uniform content prior.
#[test]
fn constant_output_content_error_matches_prior_dispersion() {
    let w = vector_world();
    let mid = w
        .compose(&ContentParams::new(vec![0.5; 4]).unwrap(), &SpecParams::new(vec![0.5; 2]).unwrap())
        .unwrap();
    let f = fidelity(&Constant(mid.data), &w, 4000, 3, 0.25).unwrap();
    assert_eq!(f.excluded, 0);
    assert!((f.content - 0.25).abs() < 0.01, "{}", f.content);
    assert!((f.spec - 0.25).abs() < 0.015, "{}", f.spec);
}

#[test]
fn unresolvable_outputs_are_excluded() {
    let w = image_world();
    let checker: Vec<f64> = (0..IMAGE_SIDE * IMAGE_SIDE)
        .map(|i| ((i / IMAGE_SIDE + i % IMAGE_SIDE) % 2) as f64)
        .collect();
    let f = fidelity(&Constant(checker), &w, 5, 0, 0.25).unwrap();
    assert_eq!(f.excluded, 5);
    assert_eq!((f.spec, f.content), (1.0, 1.0));
}

#[test]
fn self_guided_transfer_measures_reconstruction() {
    let w = vector_world();
    let m = ModelBundle::new(ModelConfig::default()).unwrap();
    let (_, b) = eval_pairs(&w, 1, 4);
    let direct = w.decompose_data(&m.decode(&m.encode(&b[0].data).unwrap()).unwrap()).unwrap();
    let via = w.decompose_data(&Translator::translate(&m, &b[0], &b[0]).unwrap()).unwrap();
    assert_eq!(direct, via);
}

#[test]
fn attribute_classifier_separates_domains_and_not_shuffled_labels() {
    let w = vector_world();
    let data = Datasets::generate(&w, 600, 600, 1);
    let cfg = ProbeConfig { steps: 600, ..ProbeConfig::default() };
    let c = train_attr_classifier(&data, 600, &cfg, 0).unwrap();
    assert!(c.holdout_accuracy > 0.95, "{}", c.holdout_accuracy);
    assert_eq!(c, train_attr_classifier(&data, 600, &cfg, 0).unwrap());

    let mut pool: Vec<Sample> = data.a.iter().chain(&data.b).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    rand::seq::SliceRandom::shuffle(&mut pool[..], &mut rng);
    let b = pool.split_off(600);
    let control = train_attr_classifier(&Datasets { a: pool, b }, 600, &cfg, 0).unwrap();
    assert!((control.holdout_accuracy - 0.5).abs() < 0.1, "{}", control.holdout_accuracy);

    let empty = Datasets { a: vec![], b: data.b.clone() };
    assert!(matches!(train_attr_classifier(&empty, 10, &cfg, 0), Err(Error::EmptyDataset("A"))));
}

#[test]
fn oracle_removal_drops_the_class_b_probability() {
    let w = vector_world();
    let data = Datasets::generate(&w, 600, 600, 1);
    let cfg = ProbeConfig { steps: 600, ..ProbeConfig::default() };
    let c = train_attr_classifier(&data, 600, &cfg, 0).unwrap();
    let (a, b) = eval_pairs(&w, 300, 2);
    let s = removal_score(&Oracle(&w), &c, &b).unwrap();
    assert!(s.raw > 0.9 && s.removed < 0.1, "{s:?}");
    let from_a = removal_score(&Oracle(&w), &c, &a).unwrap();
    assert!(from_a.removed < 0.1 && from_a.raw < 0.1, "{from_a:?}");
}

#[test]
fn full_report_for_the_oracle() {
    let w = vector_world();
    let data = Datasets::generate(&w, 400, 400, 1);
    let cfg = EvalConfig {
        n_samples: 200,
        classifier_samples: 400,
        classifier: ProbeConfig { steps: 300, ..ProbeConfig::default() },
        probe: ProbeConfig { steps: 300, ..ProbeConfig::default() },
        ..EvalConfig::default()
    };
    let r = evaluate(&Oracle(&w), &w, &data, &cfg).unwrap();
    assert_eq!((r.guided_risk, r.spec_fidelity, r.content_fidelity, r.excluded), (0.0, 0.0, 0.0, 0));
    assert!((r.probe_accuracy - 0.5).abs() < 0.15, "{}", r.probe_accuracy);
    assert_eq!(r, evaluate(&Oracle(&w), &w, &data, &cfg).unwrap());
    let zero = EvalConfig { n_samples: 0, ..cfg };
    assert!(evaluate(&Oracle(&w), &w, &data, &zero).is_err());
}

#[test]
fn grid_layout_and_determinism() {
    let w = image_world();
    let (a, b) = eval_pairs(&w, 3, 7);
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("g1.png"), dir.path().join("g2.png"));
    let o = Oracle(&w);
    export_grid(&o, &w, &a[..2], &b, &p1, Some("abc")).unwrap();
    export_grid(&o, &w, &a[..2], &b, &p2, Some("abc")).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let (gw, gh, px) = imageio::read_gray(&p1).unwrap();
    assert_eq!((gw as usize, gh as usize), (3 * IMAGE_SIDE, 4 * IMAGE_SIDE));
    // body cell (guide 1, source 0) holds the transfer, up to 8-bit levels
    let want = o.translate(&a[0], &b[1]).unwrap();
    for y in 0..IMAGE_SIDE {
        for x in 0..IMAGE_SIDE {
            let got = px[(2 * IMAGE_SIDE + y) * gw as usize + IMAGE_SIDE + x];
            assert_eq!(got, imageio::from_level(imageio::to_level(want[y * IMAGE_SIDE + x])));
        }
    }
    let vw = vector_world();
    let (va, vb) = eval_pairs(&vw, 1, 0);
    assert!(matches!(export_grid(&Oracle(&vw), &vw, &va, &vb, &p1, None), Err(Error::NotImageWorld)));
}

#[test]
fn one_by_one_grid_reconstructs_its_guide() {
    let w = image_world();
    let m = ModelBundle::new(ModelConfig::image()).unwrap();
    let (_, b) = eval_pairs(&w, 1, 3);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.png");
    export_grid(&m, &w, &b, &b, &p, None).unwrap();
    let (gw, _, px) = imageio::read_gray(&p).unwrap();
    let recon = m.decode(&m.encode(&b[0].data).unwrap()).unwrap();
    let cell: Vec<f64> = (0..IMAGE_SIDE)
        .flat_map(|y| px[(IMAGE_SIDE + y) * gw as usize + IMAGE_SIDE..][..IMAGE_SIDE].to_vec())
        .collect();
    let want: Vec<f64> = recon.iter().map(|&v| imageio::from_level(imageio::to_level(v))).collect();
    assert_eq!(cell, want);
}

#[test]
fn interpolation_endpoints_are_the_transfers() {
    let w = image_world();
    let m = ModelBundle::new(ModelConfig::image()).unwrap();
    let (a, b) = eval_pairs(&w, 2, 11);
    let frames = interpolation_frames(&m, &a[0], &b[0], &b[1], 2).unwrap();
    assert_eq!(frames[0], m.translate(&a[0].data, &b[0].data).unwrap());
    assert_eq!(frames[1], m.translate(&a[0].data, &b[1].data).unwrap());
    assert_eq!(interpolation_frames(&m, &a[0], &b[0], &b[1], 7).unwrap().len(), 7);
    assert!(interpolation_frames(&m, &a[0], &b[0], &b[1], 1).is_err());

    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("s1.png"), dir.path().join("s2.png"));
    export_interpolation(&m, &w, &a[0], &b[0], &b[1], 5, &p1, Some("h")).unwrap();
    export_interpolation(&m, &w, &a[0], &b[0], &b[1], 5, &p2, Some("h")).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let (sw, sh, _) = imageio::read_gray(&p1).unwrap();
    assert_eq!((sw as usize, sh as usize), (5 * IMAGE_SIDE, IMAGE_SIDE));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn output_noise_raises_risk_by_at_most_its_size(eps in 0.0f64..0.2, seed in any::<u64>()) {
        let w = vector_world();
        let base = guided_risk(&Oracle(&w), &w, 50, seed).unwrap();
        let noisy = guided_risk(&Noisy { inner: Oracle(&w), eps, seed }, &w, 50, seed).unwrap();
        prop_assert!(noisy - base <= eps + 1e-12, "{} -> {}", base, noisy);
    }
}
