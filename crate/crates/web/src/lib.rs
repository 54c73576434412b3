//! Three operations for the static page in `www/`:
//!
//! * `transfer_grid`: sources × guides on the glyph world, rendered by the
//!   ideal translator, as RGBA for a canvas;
//! * `TrainingDemo`: the two-pathway model learning a small vector world a
//!   few steps per animation frame;
//! * `noise_curve` / `entropy_envelope`: the weight-noise cost `q(α)` and
//!   the binary-entropy envelope, for plotting.

use latentswap::evaluate::{guided_risk, Oracle, Translator};
use latentswap::infotheory::{binary_entropy, entropy_upper_bound, q_alpha};
use latentswap::synthworld::{gen_world, Datasets, Domain, IMAGE_SIDE};
use latentswap::trainer::{code_dependence, TrainConfig, TrainData, Trainer};
use latentswap::{ModelBundle, ModelConfig, World, WorldConfig};
use wasm_bindgen::prelude::*;

fn js(e: latentswap::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Grayscale cells tiled into an RGBA buffer of side `(n + 1) · 32`.
fn grid_pixels(seed: u32, n: usize) -> latentswap::Result<Vec<u8>> {
    let world = gen_world(&WorldConfig::image(), seed as u64)?;
    let sources: Vec<_> = (0..n as u64).map(|i| world.sample_at(Domain::A, seed as u64, i)).collect();
    let guides: Vec<_> = (0..n as u64).map(|i| world.sample_at(Domain::B, seed as u64, i)).collect();
    let o = Oracle(&world);
    let side = (n + 1) * IMAGE_SIDE;
    let mut rgba = vec![255u8; side * side * 4];
    let mut put = |row: usize, col: usize, img: &[f64]| {
        for y in 0..IMAGE_SIDE {
            for x in 0..IMAGE_SIDE {
                let v = latentswap::imageio::to_level(img[y * IMAGE_SIDE + x]);
                let at = ((row * IMAGE_SIDE + y) * side + col * IMAGE_SIDE + x) * 4;
                rgba[at..at + 3].fill(v);
            }
        }
    };
    put(0, 0, &vec![0.0; IMAGE_SIDE * IMAGE_SIDE]);
    for (c, s) in sources.iter().enumerate() {
        put(0, c + 1, &s.data);
    }
    for (r, g) in guides.iter().enumerate() {
        put(r + 1, 0, &g.data);
        for (c, s) in sources.iter().enumerate() {
            put(r + 1, c + 1, &o.translate(s, g)?);
        }
    }
    Ok(rgba)
}

#[wasm_bindgen]
pub fn transfer_grid(seed: u32, n: usize) -> Result<Vec<u8>, JsError> {
    if n == 0 || n > 8 {
        return Err(JsError::new("grid size must be 1..=8"));
    }
    grid_pixels(seed, n).map_err(js)
}

#[wasm_bindgen]
pub fn grid_side(n: usize) -> usize {
    (n + 1) * IMAGE_SIDE
}

/// Pairs `[α, q(α)]`, flattened.
fn curve(alphas: &[f64]) -> latentswap::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(alphas.len() * 2);
    for &a in alphas {
        out.extend([a, q_alpha(a)?]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn noise_curve(alphas: &[f64]) -> Result<Vec<f64>, JsError> {
    curve(alphas).map_err(js)
}

/// Triples `[p, H(p), 2 ln 2 √(p(1−p))]` on `n + 1` uniform points.
#[wasm_bindgen]
pub fn entropy_envelope(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .flat_map(|i| {
            let p = i as f64 / n as f64;
            [p, binary_entropy(p).unwrap_or(f64::NAN), entropy_upper_bound(p)]
        })
        .collect()
}

/// A 4+2 parameter vector world in 8 dimensions with a model small enough
/// to train interactively.
#[wasm_bindgen]
pub struct TrainingDemo {
    world: World,
    data: TrainData,
    trainer: Trainer,
}

impl TrainingDemo {
    fn build(seed: u32, lambda: f64) -> latentswap::Result<Self> {
        let world = gen_world(&WorldConfig::default(), seed as u64)?;
        let data = TrainData::from_datasets(&Datasets::generate(&world, 2000, 2000, seed as u64))?;
        let model = ModelBundle::new(ModelConfig {
            shared_widths: vec![32, 32],
            specific_widths: vec![32, 32],
            decoder_widths: vec![32, 32],
            discriminator_widths: vec![32],
            lambda,
            init_seed: seed as u64,
            ..ModelConfig::default()
        })?;
        let cfg = TrainConfig {
            steps: u64::MAX,
            generator_lr: 1e-3,
            discriminator_lr: 1e-3,
            seed: seed as u64,
            ..TrainConfig::default()
        };
        Ok(Self {
            world,
            data,
            trainer: Trainer::new(model, cfg)?,
        })
    }

    fn advance(&mut self, n: u32) -> latentswap::Result<Vec<f64>> {
        let mut last = None;
        for _ in 0..n {
            last = Some(self.trainer.step(&self.data)?);
        }
        let step = self.trainer.model().step as f64;
        Ok(last.map_or_else(Vec::new, |l| vec![step, l.l_a, l.l_b, l.l_d]))
    }

    /// `[guided risk, code dependence]` on fresh draws.
    fn measure(&self) -> latentswap::Result<Vec<f64>> {
        let m = self.trainer.model();
        let xb = latentswap::model::data_matrix(&self.world.sample_domain(Domain::B, 256, 99));
        Ok(vec![guided_risk(m, &self.world, 128, 7)?, code_dependence(m, xb.view())?])
    }
}

#[wasm_bindgen]
impl TrainingDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, lambda: f64) -> Result<TrainingDemo, JsError> {
        Self::build(seed, lambda).map_err(js)
    }

    /// Runs `n` outer steps; returns `[step, L_A, L_B, L_D]` of the last.
    pub fn step(&mut self, n: u32) -> Result<Vec<f64>, JsError> {
        self.advance(n).map_err(js)
    }

    pub fn score(&self) -> Result<Vec<f64>, JsError> {
        self.measure().map_err(js)
    }
}
