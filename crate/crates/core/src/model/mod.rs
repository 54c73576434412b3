//! The two-pathway autoencoder, its discriminator, losses and latent
//! operations.
//!
//! All networks are small fully connected stacks with hand-written
//! backpropagation in `f64`, which keeps finite-difference checks tight.

mod gradcheck;
mod mlp;

use std::path::Path;

use ndarray::{concatenate, s, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::seeding::{stream, tag};
use crate::synthworld::Sample;
use crate::{Error, Result, FORMAT_VERSION};

pub use gradcheck::gradient_error;
pub use mlp::{Activation, Dense, Mlp, Trace};
pub(crate) use mlp::sigmoid;

/// Lower and upper clamp on discriminator probabilities.
pub const PROB_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenKind {
    Relu,
    LeakyRelu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Outputs in `(0, 1)`, matching pixel and squashed-vector data.
    Sigmoid,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Ambient dimension `M`.
    pub ambient_dim: usize,
    /// `E1`, length of the shared code.
    pub shared_dim: usize,
    /// `E2`, length of the specific code.
    pub specific_dim: usize,
    pub shared_widths: Vec<usize>,
    /// Hidden widths of the specific encoder, usually narrower than the
    /// shared one.
    pub specific_widths: Vec<usize>,
    pub decoder_widths: Vec<usize>,
    pub discriminator_widths: Vec<usize>,
    pub leaky_slope: f64,
    pub decoder_hidden: HiddenKind,
    pub decoder_output: OutputKind,
    /// Weight of the confusion term in the generator objective.
    pub lambda: f64,
    pub init_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::vector(8, 4, 2)
    }
}

impl ModelConfig {
    pub fn vector(ambient_dim: usize, shared_dim: usize, specific_dim: usize) -> Self {
        Self {
            ambient_dim,
            shared_dim,
            specific_dim,
            shared_widths: vec![64, 64, 64],
            specific_widths: vec![64, 64, 64],
            decoder_widths: vec![64, 64, 64],
            discriminator_widths: vec![64, 64],
            leaky_slope: 0.2,
            decoder_hidden: HiddenKind::Relu,
            decoder_output: OutputKind::Sigmoid,
            lambda: 0.01,
            init_seed: 0,
        }
    }

    /// 32×32 images, `E1 = 64`, `E2 = 8`.
    pub fn image() -> Self {
        Self {
            ambient_dim: 1024,
            shared_dim: 64,
            specific_dim: 8,
            shared_widths: vec![256, 128],
            specific_widths: vec![128, 64],
            decoder_widths: vec![128, 256],
            discriminator_widths: vec![64, 64],
            ..Self::vector(1024, 64, 8)
        }
    }

    /// The smallest model used for gradient checks: `M = 6`, widths 4.
    pub fn tiny() -> Self {
        Self {
            shared_widths: vec![4, 4],
            specific_widths: vec![4],
            decoder_widths: vec![4, 4],
            discriminator_widths: vec![4],
            ..Self::vector(6, 3, 2)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ambient_dim == 0 || self.shared_dim == 0 || self.specific_dim == 0 {
            return Err(Error::Config("M, E1 and E2 must be at least 1".into()));
        }
        let widths = [
            &self.shared_widths,
            &self.specific_widths,
            &self.decoder_widths,
            &self.discriminator_widths,
        ];
        if widths.iter().any(|w| w.contains(&0)) {
            return Err(Error::Config("hidden widths must be positive".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda {} must be finite and ≥ 0", self.lambda)));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::Config(format!("leaky slope {} outside (0, 1)", self.leaky_slope)));
        }
        Ok(())
    }

    fn sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
        std::iter::once(input)
            .chain(hidden.iter().copied())
            .chain(std::iter::once(output))
            .collect()
    }

    fn leaky(&self) -> Activation {
        Activation::LeakyRelu {
            slope: self.leaky_slope,
        }
    }

    fn shared_sizes(&self) -> Vec<usize> {
        Self::sizes(self.ambient_dim, &self.shared_widths, self.shared_dim)
    }

    fn specific_sizes(&self) -> Vec<usize> {
        Self::sizes(self.ambient_dim, &self.specific_widths, self.specific_dim)
    }

    fn decoder_sizes(&self) -> Vec<usize> {
        Self::sizes(self.shared_dim + self.specific_dim, &self.decoder_widths, self.ambient_dim)
    }

    fn discriminator_sizes(&self) -> Vec<usize> {
        Self::sizes(self.shared_dim, &self.discriminator_widths, 1)
    }

    fn decoder_activations(&self) -> (Activation, Activation) {
        let hidden = match self.decoder_hidden {
            HiddenKind::Relu => Activation::Relu,
            HiddenKind::LeakyRelu => self.leaky(),
        };
        let output = match self.decoder_output {
            OutputKind::Sigmoid => Activation::Sigmoid,
            OutputKind::Linear => Activation::Identity,
        };
        (hidden, output)
    }
}

/// `(e1(x), e2(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentCode {
    pub shared: Vec<f64>,
    pub specific: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Variance of the log of each multiplicative factor.
    pub alpha: f64,
}

impl NoiseConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self { alpha })
        } else {
            Err(Error::OutOfRange(format!("alpha {alpha} must be positive")))
        }
    }

    /// The factor distribution `logN(−α/2, α)`, which has mean 1.
    pub fn distribution(&self) -> LogNormal<f64> {
        LogNormal::new(-self.alpha / 2.0, self.alpha.sqrt()).expect("validated alpha")
    }
}

/// Loss values on one pair of batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub l_a: f64,
    pub l_b: f64,
    pub l_d: f64,
}

impl Losses {
    /// `L_A + L_B − λ L_D`.
    pub fn generator(&self, lambda: f64) -> f64 {
        self.l_a + self.l_b - lambda * self.l_d
    }

    pub fn is_finite(&self) -> bool {
        self.l_a.is_finite() && self.l_b.is_finite() && self.l_d.is_finite()
    }
}

/// Coefficients of a linear combination `a·L_A + b·L_B + d·L_D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// Parameter gradients, shaped like the four networks.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub e1: Mlp,
    pub e2: Mlp,
    pub g: Mlp,
    pub d: Mlp,
}

/// Encoders `e1`, `e2`, decoder `g` and discriminator `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub config: ModelConfig,
    pub e1: Mlp,
    pub e2: Mlp,
    pub g: Mlp,
    pub d: Mlp,
    pub step: u64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format_version: u32,
    #[serde(flatten)]
    model: ModelBundle,
}

/// Stacks sample data into a `n × M` matrix.
pub fn data_matrix(samples: &[Sample]) -> Array2<f64> {
    rows_matrix(samples.iter().map(|s| s.data.as_slice()), samples.first().map_or(0, |s| s.data.len()))
}

pub(crate) fn rows_matrix<'a>(rows: impl ExactSizeIterator<Item = &'a [f64]>, width: usize) -> Array2<f64> {
    let n = rows.len();
    let mut m = Array2::zeros((n, width));
    for (i, r) in rows.enumerate() {
        m.row_mut(i).assign(&ndarray::ArrayView1::from(r));
    }
    m
}

fn row(v: &[f64]) -> ArrayView2<'_, f64> {
    ArrayView2::from_shape((1, v.len()), v).expect("a slice is one contiguous row")
}

fn l1_rows(out: &Array2<f64>, x: ArrayView2<f64>) -> f64 {
    (out - &x).mapv(f64::abs).sum() / x.nrows() as f64
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// `−ln p` for label 1 or `−ln(1 − p)` for label 0, averaged, with
/// `∂/∂logit` per row (zero where the clamp is active).
fn bce(logits: &Array2<f64>, label: f64) -> (f64, Array2<f64>) {
    let n = logits.nrows() as f64;
    let mut loss = 0.0;
    let grad = logits.mapv(|z| {
        let s = mlp::sigmoid(z);
        let p = clamp_prob(s);
        let clamped = p != s;
        if label == 1.0 {
            loss -= p.ln();
            if clamped {
                0.0
            } else {
                -(1.0 - s) / n
            }
        } else {
            loss -= (1.0 - p).ln();
            if clamped {
                0.0
            } else {
                s / n
            }
        }
    });
    (loss / n, grad)
}

fn nonempty(x: ArrayView2<f64>, what: &'static str) -> Result<()> {
    if x.nrows() == 0 {
        Err(Error::EmptyBatch(what))
    } else {
        Ok(())
    }
}

impl ModelBundle {
    /// Fresh networks drawn from `config.init_seed`.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let rng = |label: &str| stream(config.init_seed, &[tag("init"), tag(label)]);
        let (dh, dout) = config.decoder_activations();
        let leaky = config.leaky();
        Ok(Self {
            e1: Mlp::new(&config.shared_sizes(), leaky, Activation::Identity, &mut rng("e1")),
            e2: Mlp::new(&config.specific_sizes(), leaky, Activation::Identity, &mut rng("e2")),
            g: Mlp::new(&config.decoder_sizes(), dh, dout, &mut rng("g")),
            d: Mlp::new(&config.discriminator_sizes(), leaky, Activation::Identity, &mut rng("d")),
            config,
            step: 0,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn check_len(&self, what: &'static str, expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { what, expected, got })
        }
    }

    fn check_batch(&self, x: ArrayView2<f64>) -> Result<()> {
        self.check_len("batch width", self.config.ambient_dim, x.ncols())
    }

    pub fn encode_shared(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len("input", self.config.ambient_dim, x.len())?;
        Ok(self.e1.forward(row(x)).into_raw_vec_and_offset().0)
    }

    pub fn encode_specific(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len("input", self.config.ambient_dim, x.len())?;
        Ok(self.e2.forward(row(x)).into_raw_vec_and_offset().0)
    }

    pub fn encode(&self, x: &[f64]) -> Result<LatentCode> {
        Ok(LatentCode {
            shared: self.encode_shared(x)?,
            specific: self.encode_specific(x)?,
        })
    }

    pub fn decode(&self, code: &LatentCode) -> Result<Vec<f64>> {
        self.check_len("shared code", self.config.shared_dim, code.shared.len())?;
        self.check_len("specific code", self.config.specific_dim, code.specific.len())?;
        let z: Vec<f64> = code.shared.iter().chain(&code.specific).copied().collect();
        Ok(self.g.forward(row(&z)).into_raw_vec_and_offset().0)
    }

    /// `g(e1(a), e2(b))`.
    pub fn translate(&self, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        self.decode(&LatentCode {
            shared: self.encode_shared(a)?,
            specific: self.encode_specific(b)?,
        })
    }

    /// `g(e1(x), 0)`, the domain `A` reconstruction path.
    pub fn remove(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.decode(&LatentCode {
            shared: self.encode_shared(x)?,
            specific: vec![0.0; self.config.specific_dim],
        })
    }

    /// Decodes `e1(a)` with the specific code blended `(1 − t)·e2(b1) + t·e2(b2)`.
    pub fn interpolate(&self, a: &[f64], b1: &[f64], b2: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange(format!("interpolation parameter {t} outside [0, 1]")));
        }
        let (s1, s2) = (self.encode_specific(b1)?, self.encode_specific(b2)?);
        let specific = s1.iter().zip(&s2).map(|(u, v)| (1.0 - t) * u + t * v).collect();
        self.decode(&LatentCode {
            shared: self.encode_shared(a)?,
            specific,
        })
    }

    /// Discriminator probability that a shared code came from domain `B`,
    /// clamped to `[1e-6, 1 − 1e-6]`.
    pub fn discriminate(&self, shared: &[f64]) -> Result<f64> {
        self.check_len("shared code", self.config.shared_dim, shared.len())?;
        Ok(clamp_prob(mlp::sigmoid(self.d.forward(row(shared))[[0, 0]])))
    }

    pub fn encode_shared_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_batch(x)?;
        Ok(self.e1.forward(x))
    }

    pub fn encode_specific_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_batch(x)?;
        Ok(self.e2.forward(x))
    }

    /// `g(e1(x), 0)` row by row.
    pub fn remove_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let s = self.encode_shared_batch(x)?;
        let z = concatenate![Axis(1), s, Array2::zeros((x.nrows(), self.config.specific_dim))];
        Ok(self.g.forward(z.view()))
    }

    /// `g(e1(xa_i), e2(xb_i))` row by row.
    pub fn translate_batch(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_len("guide batch rows", xa.nrows(), xb.nrows())?;
        let s = self.encode_shared_batch(xa)?;
        let c = self.encode_specific_batch(xb)?;
        Ok(self.g.forward(concatenate![Axis(1), s, c].view()))
    }

    pub fn discriminate_batch(&self, shared: ArrayView2<f64>) -> Array2<f64> {
        self.d.forward(shared).mapv(|z| clamp_prob(mlp::sigmoid(z)))
    }

    /// Mean L1 reconstruction of `A` samples through `(e1(a), 0)`.
    pub fn loss_a(&self, xa: ArrayView2<f64>) -> Result<f64> {
        nonempty(xa, "A")?;
        Ok(l1_rows(&self.remove_batch(xa)?, xa))
    }

    /// Mean L1 reconstruction of `B` samples through `(e1(b), e2(b))`.
    pub fn loss_b(&self, xb: ArrayView2<f64>) -> Result<f64> {
        nonempty(xb, "B")?;
        Ok(l1_rows(&self.translate_batch(xb, xb)?, xb))
    }

    /// Binary cross entropy of `d ∘ e1` with `A` labelled 0 and `B` labelled 1.
    pub fn loss_d(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<f64> {
        nonempty(xa, "A")?;
        nonempty(xb, "B")?;
        let la = bce(&self.d.forward(self.encode_shared_batch(xa)?.view()), 0.0).0;
        let lb = bce(&self.d.forward(self.encode_shared_batch(xb)?.view()), 1.0).0;
        Ok(la + lb)
    }

    pub fn losses(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<Losses> {
        Ok(Losses {
            l_a: self.loss_a(xa)?,
            l_b: self.loss_b(xb)?,
            l_d: self.loss_d(xa, xb)?,
        })
    }

    /// `(L_A + L_B − λ L_D, L_D)`: minimized by the encoders and decoder and
    /// by the discriminator respectively.
    pub fn objective(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<(f64, f64)> {
        let l = self.losses(xa, xb)?;
        Ok((l.generator(self.config.lambda), l.l_d))
    }

    /// Gradients of `w.a·L_A + w.b·L_B + w.d·L_D` with respect to every
    /// parameter. Terms with a zero weight are skipped.
    pub fn loss_gradients(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>, w: LossWeights) -> Result<(Losses, Gradients)> {
        self.gradients_impl(xa, xb, w, true)
    }

    /// Gradient of `L_A + L_B − λ L_D` (only the `e1`, `e2`, `g` parts are
    /// meaningful to the generator step).
    pub fn generator_gradients(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<(Losses, Gradients)> {
        let w = LossWeights {
            a: 1.0,
            b: 1.0,
            d: -self.config.lambda,
        };
        self.gradients_impl(xa, xb, w, true)
    }

    /// Gradient of `L_D` with respect to the discriminator only.
    pub fn discriminator_gradients(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<(f64, Mlp)> {
        let w = LossWeights { a: 0.0, b: 0.0, d: 1.0 };
        let (l, g) = self.gradients_impl(xa, xb, w, false)?;
        Ok((l.l_d, g.d))
    }

    fn gradients_impl(&self, xa: ArrayView2<f64>, xb: ArrayView2<f64>, w: LossWeights, encoders: bool) -> Result<(Losses, Gradients)> {
        nonempty(xa, "A")?;
        nonempty(xb, "B")?;
        self.check_batch(xa)?;
        self.check_batch(xb)?;
        let e1_dim = self.config.shared_dim;
        let mut grads = Gradients {
            e1: self.e1.zeros_like(),
            e2: self.e2.zeros_like(),
            g: self.g.zeros_like(),
            d: self.d.zeros_like(),
        };
        let ta = self.e1.forward_trace(xa);
        let tb = self.e1.forward_trace(xb);
        let sa = ta.output();
        let sb = tb.output();
        let mut dsa = Array2::<f64>::zeros(sa.raw_dim());
        let mut dsb = Array2::<f64>::zeros(sb.raw_dim());
        let mut losses = Losses {
            l_a: f64::NAN,
            l_b: f64::NAN,
            l_d: f64::NAN,
        };

        let need_recon = encoders && (w.a != 0.0 || w.b != 0.0);
        let mut dcb = None;
        let tc = need_recon.then(|| self.e2.forward_trace(xb));
        if need_recon {
            let za = concatenate![Axis(1), *sa, Array2::zeros((xa.nrows(), self.config.specific_dim))];
            let tga = self.g.forward_trace(za.view());
            let ra = tga.output() - &xa;
            losses.l_a = ra.mapv(f64::abs).sum() / xa.nrows() as f64;
            if w.a != 0.0 {
                let scale = w.a / xa.nrows() as f64;
                let gz = self.g.backward(&tga, ra.mapv(|r| scale * sign(r)), &mut grads.g);
                dsa += &gz.slice(s![.., ..e1_dim]);
            }
            let tc = tc.as_ref().expect("traced when reconstructing");
            let zb = concatenate![Axis(1), *sb, *tc.output()];
            let tgb = self.g.forward_trace(zb.view());
            let rb = tgb.output() - &xb;
            losses.l_b = rb.mapv(f64::abs).sum() / xb.nrows() as f64;
            if w.b != 0.0 {
                let scale = w.b / xb.nrows() as f64;
                let gz = self.g.backward(&tgb, rb.mapv(|r| scale * sign(r)), &mut grads.g);
                dsb += &gz.slice(s![.., ..e1_dim]);
                dcb = Some(gz.slice(s![.., e1_dim..]).to_owned());
            }
        }

        let tda = self.d.forward_trace(sa.view());
        let tdb = self.d.forward_trace(sb.view());
        let (lda, gla) = bce(tda.output(), 0.0);
        let (ldb, glb) = bce(tdb.output(), 1.0);
        losses.l_d = lda + ldb;
        if w.d != 0.0 {
            dsa += &self.d.backward(&tda, gla * w.d, &mut grads.d);
            dsb += &self.d.backward(&tdb, glb * w.d, &mut grads.d);
        }

        if encoders {
            self.e1.backward(&ta, dsa, &mut grads.e1);
            self.e1.backward(&tb, dsb, &mut grads.e1);
            if let (Some(tc), Some(dcb)) = (tc.as_ref(), dcb) {
                self.e2.backward(tc, dcb, &mut grads.e2);
            }
        }
        Ok((losses, grads))
    }

    /// Multiplies every encoder weight (not bias) by an independent
    /// `logN(−α/2, α)` factor; decoder and discriminator are untouched.
    pub fn perturb_weights(&self, noise: &NoiseConfig, seed: u64) -> Result<ModelBundle> {
        let noise = NoiseConfig::new(noise.alpha)?;
        let dist = noise.distribution();
        let mut out = self.clone();
        for (label, net) in [("e1", &mut out.e1), ("e2", &mut out.e2)] {
            let mut rng = stream(seed, &[tag("perturb"), tag(label)]);
            for layer in &mut net.layers {
                layer.w.mapv_inplace(|w| w * dist.sample(&mut rng));
            }
        }
        Ok(out)
    }

    fn check_shapes(&self) -> Result<()> {
        let c = &self.config;
        for (name, net, want) in [
            ("e1", &self.e1, c.shared_sizes()),
            ("e2", &self.e2, c.specific_sizes()),
            ("g", &self.g, c.decoder_sizes()),
            ("d", &self.d, c.discriminator_sizes()),
        ] {
            let ok = net.sizes() == want
                && net
                    .layers
                    .iter()
                    .all(|l| l.b.len() == l.w.nrows());
            if !ok {
                return Err(Error::CheckpointMismatch(format!(
                    "network {name} has layer sizes {:?}, config implies {want:?}",
                    net.sizes()
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CheckpointFile {
            format_version: FORMAT_VERSION,
            model: self.clone(),
        };
        serde_json::to_string(&file).map_err(|e| Error::format("<model>", e))
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let file: CheckpointFile = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "format version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        file.model.config.validate()?;
        file.model.check_shapes()?;
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// Loads a checkpoint and insists it was built from `expected`.
    pub fn load_expecting(path: &Path, expected: &ModelConfig) -> Result<Self> {
        let m = Self::load(path)?;
        if &m.config != expected {
            return Err(Error::CheckpointMismatch(format!(
                "{} was trained with a different model configuration",
                path.display()
            )));
        }
        Ok(m)
    }
}

fn sign(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Draws a random point in parameter space for checks: each parameter
/// uniform in `[−scale, scale]`.
pub fn randomize<R: Rng>(m: &mut ModelBundle, scale: f64, rng: &mut R) {
    for net in [&mut m.e1, &mut m.e2, &mut m.g, &mut m.d] {
        for p in net.params_mut() {
            *p = rng.random_range(-scale..scale);
        }
    }
}

#[cfg(test)]
mod tests;
