//! Alternating optimization of the confusion min-max objective.
//!
//! Each outer step runs `d_steps_per_g_step` discriminator updates on
//! `L_D`, then one update of both encoders and the decoder on
//! `L_A + L_B − λ L_D` with the discriminator frozen. Batches are a pure
//! function of `(seed, step, substep)`, so a resumed run replays exactly.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::infotheory::{gaussian_block_tc, GaussianSummary};
use crate::model::{data_matrix, Losses, ModelBundle};
use crate::optim::{Adam, AdamConfig};
use crate::probe::{self, ProbeConfig};
use crate::seeding::{stream, tag};
use crate::synthworld::{Datasets, Domain};
use crate::{Error, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub steps: u64,
    pub batch_size: usize,
    pub generator_lr: f64,
    pub discriminator_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub d_steps_per_g_step: usize,
    pub seed: u64,
    pub checkpoint_every: u64,
    pub eval_every: u64,
    /// Rows per domain used for reports (the first ones of each dataset).
    pub eval_samples: usize,
    pub probe: ProbeConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 20_000,
            batch_size: 64,
            generator_lr: 2e-4,
            discriminator_lr: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            d_steps_per_g_step: 1,
            seed: 0,
            checkpoint_every: 5_000,
            eval_every: 1_000,
            eval_samples: 512,
            probe: ProbeConfig {
                steps: 400,
                ..ProbeConfig::default()
            },
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("steps", self.steps),
            ("batch_size", self.batch_size as u64),
            ("d_steps_per_g_step", self.d_steps_per_g_step as u64),
            ("checkpoint_every", self.checkpoint_every),
            ("eval_every", self.eval_every),
            ("eval_samples", self.eval_samples as u64),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        for (name, lr) in [("generator_lr", self.generator_lr), ("discriminator_lr", self.discriminator_lr)] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn adam(&self, lr: f64) -> AdamConfig {
        AdamConfig {
            lr,
            beta1: self.beta1,
            beta2: self.beta2,
            ..AdamConfig::default()
        }
    }

    /// True if `other` only differs in how long to run.
    fn compatible(&self, other: &TrainConfig) -> bool {
        TrainConfig { steps: 0, ..self.clone() } == TrainConfig { steps: 0, ..other.clone() }
    }
}

/// Training inputs: sample data only. Hidden parameters are dropped here so
/// no training code can see them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainData {
    pub a: Array2<f64>,
    pub b: Array2<f64>,
}

impl TrainData {
    pub fn new(a: Array2<f64>, b: Array2<f64>) -> Result<Self> {
        if a.nrows() == 0 {
            return Err(Error::EmptyDataset("A"));
        }
        if b.nrows() == 0 {
            return Err(Error::EmptyDataset("B"));
        }
        if a.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch {
                what: "domain widths",
                expected: a.ncols(),
                got: b.ncols(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn from_datasets(d: &Datasets) -> Result<Self> {
        Self::new(data_matrix(&d.a), data_matrix(&d.b))
    }

    fn rows(&self, d: Domain) -> &Array2<f64> {
        match d {
            Domain::A => &self.a,
            Domain::B => &self.b,
        }
    }

    /// Batch drawn with replacement; depends only on the arguments.
    pub fn batch(&self, d: Domain, size: usize, seed: u64, step: u64, substep: u64) -> Array2<f64> {
        let x = self.rows(d);
        let mut rng = stream(seed, &[tag("batch"), tag(d.label()), step, substep]);
        let idx: Vec<usize> = (0..size).map(|_| rng.random_range(0..x.nrows())).collect();
        x.select(Axis(0), &idx)
    }

    fn head(&self, d: Domain, n: usize) -> ArrayView2<'_, f64> {
        let x = self.rows(d);
        x.slice(ndarray::s![..n.min(x.nrows()), ..])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub step: u64,
    pub l_a: f64,
    pub l_b: f64,
    pub l_d: f64,
    pub generator_objective: f64,
    /// Gaussian-fit dependence between `e1(b)` and `e2(b)`, in nats.
    pub gaussian_tc_proxy: f64,
    /// Held-out accuracy of a fresh domain classifier on shared codes.
    pub probe_accuracy: f64,
}

/// Adam state of the four networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimizers {
    pub e1: Adam,
    pub e2: Adam,
    pub g: Adam,
    pub d: Adam,
}

impl Optimizers {
    pub fn new(m: &ModelBundle, cfg: &TrainConfig) -> Self {
        let gen = cfg.adam(cfg.generator_lr);
        Self {
            e1: Adam::new(&m.e1, gen),
            e2: Adam::new(&m.e2, gen),
            g: Adam::new(&m.g, gen),
            d: Adam::new(&m.d, cfg.adam(cfg.discriminator_lr)),
        }
    }

    fn matches(&self, m: &ModelBundle) -> bool {
        self.e1.matches(&m.e1) && self.e2.matches(&m.e2) && self.g.matches(&m.g) && self.d.matches(&m.d)
    }
}

/// Everything needed to continue a run bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub train: TrainConfig,
    pub model: ModelBundle,
    pub optimizers: Optimizers,
    pub reports: Vec<LossReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| Error::format(path, e))?;
        // write-then-rename so an interrupted save never clobbers the last good file
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::format(path, e))?;
        if ck.format_version != FORMAT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "format version {} (expected {FORMAT_VERSION})",
                ck.format_version
            )));
        }
        // round-trip through the model loader for its shape checks
        ModelBundle::from_json(&ck.model.to_json()?, path)?;
        if !ck.optimizers.matches(&ck.model) {
            return Err(Error::CheckpointMismatch("optimizer state does not fit the model".into()));
        }
        Ok(ck)
    }
}

fn check_finite(l: &Losses, step: u64, side: &str) -> Result<()> {
    for (name, v) in [("L_A", l.l_a), ("L_B", l.l_b), ("L_D", l.l_d)] {
        if v.is_nan() && side == "discriminator" && name != "L_D" {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteLoss {
                step,
                what: format!("{name} = {v} in the {side} step"),
            });
        }
    }
    Ok(())
}

/// One Adam update of the discriminator on `L_D`; nothing else changes.
pub fn step_discriminator(m: &mut ModelBundle, opt: &mut Adam, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<f64> {
    let (l_d, grad) = m.discriminator_gradients(xa, xb)?;
    check_finite(&Losses { l_a: f64::NAN, l_b: f64::NAN, l_d }, m.step, "discriminator")?;
    opt.step(&mut m.d, &grad);
    Ok(l_d)
}

/// One Adam update of `e1`, `e2`, `g` on `L_A + L_B − λ L_D`; the
/// discriminator is left as is.
pub fn step_generator(m: &mut ModelBundle, opt: &mut Optimizers, xa: ArrayView2<f64>, xb: ArrayView2<f64>) -> Result<Losses> {
    let (losses, grad) = m.generator_gradients(xa, xb)?;
    check_finite(&losses, m.step, "generator")?;
    opt.e1.step(&mut m.e1, &grad.e1);
    opt.e2.step(&mut m.e2, &grad.e2);
    opt.g.step(&mut m.g, &grad.g);
    Ok(losses)
}

/// Block dependence between shared and specific codes of `xb` under a
/// Gaussian fit (with a small relative ridge for rank-deficient codes).
pub fn code_dependence(m: &ModelBundle, xb: ArrayView2<f64>) -> Result<f64> {
    let s = m.encode_shared_batch(xb)?;
    let c = m.encode_specific_batch(xb)?;
    let joint = ndarray::concatenate![Axis(1), s, c];
    let rows: Vec<Vec<f64>> = joint.rows().into_iter().map(|r| r.to_vec()).collect();
    let g = GaussianSummary::from_samples(&rows)?.with_ridge(1e-6);
    gaussian_block_tc(&g, m.config.shared_dim)
}

/// Held-out accuracy of a fresh classifier separating `e1(a)` from `e1(b)`.
pub fn domain_probe_accuracy(m: &ModelBundle, xa: ArrayView2<f64>, xb: ArrayView2<f64>, cfg: &ProbeConfig, seed: u64) -> Result<f64> {
    let sa = m.encode_shared_batch(xa)?;
    let sb = m.encode_shared_batch(xb)?;
    Ok(probe::fit(sa.view(), sb.view(), cfg, seed)?.holdout_accuracy)
}

pub fn report(m: &ModelBundle, data: &TrainData, cfg: &TrainConfig) -> Result<LossReport> {
    let xa = data.head(Domain::A, cfg.eval_samples);
    let xb = data.head(Domain::B, cfg.eval_samples);
    let l = m.losses(xa, xb)?;
    check_finite(&l, m.step, "evaluation")?;
    Ok(LossReport {
        step: m.step,
        l_a: l.l_a,
        l_b: l.l_b,
        l_d: l.l_d,
        generator_objective: l.generator(m.config.lambda),
        gaussian_tc_proxy: code_dependence(m, xb)?,
        probe_accuracy: domain_probe_accuracy(m, xa, xb, &cfg.probe, cfg.seed ^ m.step)?,
    })
}

pub struct Trainer {
    cfg: TrainConfig,
    model: ModelBundle,
    opt: Optimizers,
    reports: Vec<LossReport>,
}

impl Trainer {
    pub fn new(model: ModelBundle, cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            opt: Optimizers::new(&model, &cfg),
            cfg,
            model,
            reports: vec![],
        })
    }

    /// Continues from `ck`; `cfg` may change only the step count.
    pub fn resume(ck: Checkpoint, cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if !ck.train.compatible(&cfg) {
            return Err(Error::CheckpointMismatch(
                "training configuration differs from the checkpoint's".into(),
            ));
        }
        Ok(Self {
            cfg,
            model: ck.model,
            opt: ck.optimizers,
            reports: ck.reports,
        })
    }

    pub fn model(&self) -> &ModelBundle {
        &self.model
    }

    pub fn reports(&self) -> &[LossReport] {
        &self.reports
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format_version: FORMAT_VERSION,
            train: self.cfg.clone(),
            model: self.model.clone(),
            optimizers: self.opt.clone(),
            reports: self.reports.clone(),
            config_hash: None,
        }
    }

    /// One outer step.
    pub fn step(&mut self, data: &TrainData) -> Result<Losses> {
        let (bs, seed, t) = (self.cfg.batch_size, self.cfg.seed, self.model.step);
        let k = self.cfg.d_steps_per_g_step as u64;
        for sub in 0..k {
            let xa = data.batch(Domain::A, bs, seed, t, sub);
            let xb = data.batch(Domain::B, bs, seed, t, sub);
            step_discriminator(&mut self.model, &mut self.opt.d, xa.view(), xb.view())?;
        }
        let xa = data.batch(Domain::A, bs, seed, t, k);
        let xb = data.batch(Domain::B, bs, seed, t, k);
        let l = step_generator(&mut self.model, &mut self.opt, xa.view(), xb.view())?;
        self.model.step += 1;
        Ok(l)
    }

    fn push_report(&mut self, data: &TrainData, out: Option<&RunFiles>) -> Result<()> {
        if self.reports.last().is_some_and(|r| r.step == self.model.step) {
            return Ok(());
        }
        let r = report(&self.model, data, &self.cfg)?;
        if let Some(f) = out {
            f.append_metrics(&r)?;
        }
        self.reports.push(r);
        Ok(())
    }

    /// Trains until `cfg.steps`, reporting at step 0, every `eval_every`
    /// steps and at the end. With `out`, checkpoints and metrics are
    /// written there; on a non-finite loss the last checkpoint is kept.
    pub fn run(&mut self, data: &TrainData, out: Option<&RunFiles>) -> Result<()> {
        if data.a.ncols() != self.model.config.ambient_dim {
            return Err(Error::DimensionMismatch {
                what: "training data width",
                expected: self.model.config.ambient_dim,
                got: data.a.ncols(),
            });
        }
        if let Some(f) = out {
            f.rewrite_metrics(&self.reports)?;
        }
        if self.model.step == 0 {
            self.push_report(data, out)?;
        }
        while self.model.step < self.cfg.steps {
            self.step(data)?;
            let t = self.model.step;
            if t % self.cfg.eval_every == 0 || t == self.cfg.steps {
                self.push_report(data, out)?;
            }
            if let Some(f) = out {
                if t % self.cfg.checkpoint_every == 0 || t == self.cfg.steps {
                    let mut ck = self.checkpoint();
                    ck.config_hash = f.stamp.clone();
                    f.save_checkpoint(&ck)?;
                }
            }
        }
        Ok(())
    }

    pub fn into_parts(self) -> (ModelBundle, Vec<LossReport>) {
        (self.model, self.reports)
    }
}

/// `train(data, model, cfg)` without any files.
pub fn train(data: &TrainData, model: ModelBundle, cfg: &TrainConfig) -> Result<(ModelBundle, Vec<LossReport>)> {
    let mut t = Trainer::new(model, cfg.clone())?;
    t.run(data, None)?;
    Ok(t.into_parts())
}

/// Output layout of a training run: `checkpoint-<step>.json`,
/// `latest.json` and `metrics.jsonl`. A `stamp` (the run's config hash)
/// goes into every checkpoint and every metrics line.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub dir: PathBuf,
    pub stamp: Option<String>,
}

#[derive(Serialize)]
struct MetricsLine<'a> {
    #[serde(flatten)]
    report: &'a LossReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_hash: Option<&'a str>,
}

impl RunFiles {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir, stamp: None })
    }

    pub fn stamped(mut self, stamp: impl Into<String>) -> Self {
        self.stamp = Some(stamp.into());
        self
    }

    fn line(&self, r: &LossReport) -> Result<String> {
        let m = MetricsLine {
            report: r,
            config_hash: self.stamp.as_deref(),
        };
        serde_json::to_string(&m).map_err(|e| Error::format(self.metrics(), e))
    }

    pub fn latest(&self) -> PathBuf {
        self.dir.join("latest.json")
    }

    pub fn metrics(&self) -> PathBuf {
        self.dir.join("metrics.jsonl")
    }

    fn save_checkpoint(&self, ck: &Checkpoint) -> Result<()> {
        ck.save(&self.dir.join(format!("checkpoint-{:08}.json", ck.model.step)))?;
        ck.save(&self.latest())
    }

    fn rewrite_metrics(&self, reports: &[LossReport]) -> Result<()> {
        let path = self.metrics();
        let mut text = String::new();
        for r in reports {
            text += &self.line(r)?;
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    fn append_metrics(&self, r: &LossReport) -> Result<()> {
        let path = self.metrics();
        let line = self.line(r)?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(f, "{line}").map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests;
