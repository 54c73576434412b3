//! Transfer quality against the world's ground truth, the removal protocol,
//! and figure export.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::imageio;
use crate::model::{data_matrix, ModelBundle};
use crate::probe::{self, Classifier, ProbeConfig};
use crate::seeding::{derive, tag};
use crate::synthworld::{Datasets, Domain, Sample, World, IMAGE_SIDE};
use crate::{Error, Result};

/// Anything that can transfer, remove and expose a shared code.
pub trait Translator {
    /// Content of `a` with the specification of `b`.
    fn translate(&self, a: &Sample, b: &Sample) -> Result<Vec<f64>>;
    fn remove(&self, b: &Sample) -> Result<Vec<f64>>;
    fn shared_code(&self, x: &Sample) -> Result<Vec<f64>>;
}

impl Translator for ModelBundle {
    fn translate(&self, a: &Sample, b: &Sample) -> Result<Vec<f64>> {
        ModelBundle::translate(self, &a.data, &b.data)
    }

    fn remove(&self, b: &Sample) -> Result<Vec<f64>> {
        ModelBundle::remove(self, &b.data)
    }

    fn shared_code(&self, x: &Sample) -> Result<Vec<f64>> {
        self.encode_shared(&x.data)
    }
}

/// Encodes through the hidden parameters and decodes by rendering: the
/// ideal model.
pub struct Oracle<'w>(pub &'w World);

impl Translator for Oracle<'_> {
    fn translate(&self, a: &Sample, b: &Sample) -> Result<Vec<f64>> {
        Ok(self.0.oracle_y(a, b)?.data)
    }

    fn remove(&self, b: &Sample) -> Result<Vec<f64>> {
        Ok(self.0.oracle_remove(b).data)
    }

    fn shared_code(&self, x: &Sample) -> Result<Vec<f64>> {
        Ok(x.hidden_content.values().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Projected outputs with a larger decomposition residual are left out
    /// of the fidelity means.
    pub max_residual: f64,
    /// Training rows per domain for the attribute classifier.
    pub classifier_samples: usize,
    pub classifier: ProbeConfig,
    pub probe: ProbeConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_samples: 1000,
            seed: 0,
            max_residual: 0.25,
            classifier_samples: 2000,
            classifier: ProbeConfig::default(),
            probe: ProbeConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("eval.n_samples must be at least 1".into()));
        }
        if self.classifier_samples < 2 {
            return Err(Error::Config("eval.classifier_samples must be at least 2".into()));
        }
        if !(self.max_residual > 0.0) {
            return Err(Error::Config("eval.max_residual must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub guided_risk: f64,
    pub spec_fidelity: f64,
    pub content_fidelity: f64,
    /// Outputs left out of the fidelity means as unresolvable.
    pub excluded: usize,
    /// Mean class-B probability of `remove(b)`.
    pub removal_prob_b: f64,
    /// The same on untouched `b`, the reference level.
    pub raw_prob_b: f64,
    pub classifier_accuracy: f64,
    pub probe_accuracy: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Independent evaluation pairs `(aᵢ, bᵢ)`.
pub fn eval_pairs(world: &World, n: usize, seed: u64) -> (Vec<Sample>, Vec<Sample>) {
    (
        world.sample_domain(Domain::A, n, derive(seed, &[tag("eval"), tag("A")])),
        world.sample_domain(Domain::B, n, derive(seed, &[tag("eval"), tag("B")])),
    )
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyBatch("evaluation needs at least one sample"))
    } else {
        Ok(())
    }
}

/// `(1/n) Σ ‖translate(aᵢ, bᵢ) − y(aᵢ, bᵢ)‖₁ / M`.
pub fn guided_risk(t: &dyn Translator, world: &World, n: usize, seed: u64) -> Result<f64> {
    check_n(n)?;
    let (a, b) = eval_pairs(world, n, seed);
    let m = world.ambient_dim() as f64;
    let mut total = 0.0;
    for (a, b) in a.iter().zip(&b) {
        let out = t.translate(a, b)?;
        let y = world.oracle_y(a, b)?;
        total += out.iter().zip(&y.data).map(|(u, v)| (u - v).abs()).sum::<f64>() / m;
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    /// Mean per-component spec error of decoded outputs against `u2(b)`.
    pub spec: f64,
    /// Mean per-component content error against `u1(a)`.
    pub content: f64,
    pub excluded: usize,
    /// Mean absolute error of each spec component on its own.
    pub spec_components: Vec<f64>,
    pub content_components: Vec<f64>,
}

/// Decomposes each transfer output and compares its parameters with the
/// intended ones. If every output is unresolvable both errors are 1, the
/// largest a parameter in `[0, 1]` can be off by.
pub fn fidelity(t: &dyn Translator, world: &World, n: usize, seed: u64, max_residual: f64) -> Result<Fidelity> {
    check_n(n)?;
    let (a, b) = eval_pairs(world, n, seed);
    let mut spec = vec![0.0; world.spec_dim()];
    let mut content = vec![0.0; world.content_dim()];
    let mut kept = 0usize;
    let accumulate = |acc: &mut [f64], got: &[f64], want: &[f64]| {
        for ((s, g), w) in acc.iter_mut().zip(got).zip(want) {
            *s += (g - w).abs();
        }
    };
    for (a, b) in a.iter().zip(&b) {
        let d = world.decompose_data(&t.translate(a, b)?)?;
        if d.residual > max_residual {
            continue;
        }
        kept += 1;
        let want = b.hidden_spec.as_ref().ok_or(Error::SpecMissing)?;
        accumulate(&mut spec, d.spec.values(), want.values());
        accumulate(&mut content, d.content.values(), a.hidden_content.values());
    }
    if kept == 0 {
        return Ok(Fidelity {
            spec: 1.0,
            content: 1.0,
            excluded: n,
            spec_components: vec![1.0; spec.len()],
            content_components: vec![1.0; content.len()],
        });
    }
    let per = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x / kept as f64).collect() };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (spec, content) = (per(spec), per(content));
    Ok(Fidelity {
        spec: mean(&spec),
        content: mean(&content),
        excluded: n - kept,
        spec_components: spec,
        content_components: content,
    })
}

fn head(samples: &[Sample], n: usize) -> Array2<f64> {
    data_matrix(&samples[..n.min(samples.len())])
}

/// Domain classifier on raw data (A = 0, B = 1).
pub fn train_attr_classifier(data: &Datasets, n: usize, cfg: &ProbeConfig, seed: u64) -> Result<Classifier> {
    if data.a.is_empty() {
        return Err(Error::EmptyDataset("A"));
    }
    if data.b.is_empty() {
        return Err(Error::EmptyDataset("B"));
    }
    probe::fit(head(&data.a, n).view(), head(&data.b, n).view(), cfg, derive(seed, &[tag("attr")]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalScore {
    pub removed: f64,
    pub raw: f64,
}

/// Mean class-B probability over `remove(x)` and over raw `x`.
pub fn removal_score(t: &dyn Translator, clf: &Classifier, xs: &[Sample]) -> Result<RemovalScore> {
    check_n(xs.len())?;
    let removed: Vec<Sample> = xs
        .iter()
        .map(|x| {
            Ok(Sample {
                data: t.remove(x)?,
                ..x.clone()
            })
        })
        .collect::<Result<_>>()?;
    let mean = |s: &[Sample]| -> Result<f64> {
        let p = clf.predict_proba(data_matrix(s).view())?;
        Ok(p.iter().sum::<f64>() / p.len() as f64)
    };
    Ok(RemovalScore {
        removed: mean(&removed)?,
        raw: mean(xs)?,
    })
}

/// Held-out accuracy of a fresh classifier telling shared codes of A from B.
pub fn probe_accuracy(t: &dyn Translator, world: &World, n: usize, cfg: &ProbeConfig, seed: u64) -> Result<f64> {
    let n = n.max(4);
    let (a, b) = eval_pairs(world, n, derive(seed, &[tag("probe")]));
    let codes = |xs: &[Sample]| -> Result<Array2<f64>> {
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| t.shared_code(x)).collect::<Result<_>>()?;
        let width = rows[0].len();
        Ok(Array2::from_shape_vec((rows.len(), width), rows.concat()).expect("equal code lengths"))
    };
    Ok(probe::fit(codes(&a)?.view(), codes(&b)?.view(), cfg, seed)?.holdout_accuracy)
}

/// Every metric, with the attribute classifier trained on `train`.
pub fn evaluate(t: &dyn Translator, world: &World, train: &Datasets, cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let n = cfg.n_samples;
    let fid = fidelity(t, world, n, cfg.seed, cfg.max_residual)?;
    let clf = train_attr_classifier(train, cfg.classifier_samples, &cfg.classifier, cfg.seed)?;
    let (_, b) = eval_pairs(world, n, cfg.seed);
    let removal = removal_score(t, &clf, &b)?;
    let report = EvalReport {
        guided_risk: guided_risk(t, world, n, cfg.seed)?,
        spec_fidelity: fid.spec,
        content_fidelity: fid.content,
        excluded: fid.excluded,
        removal_prob_b: removal.removed,
        raw_prob_b: removal.raw,
        classifier_accuracy: clf.holdout_accuracy,
        probe_accuracy: probe_accuracy(t, world, n, &cfg.probe, cfg.seed)?,
        n_samples: n,
        seed: cfg.seed,
    };
    let finite = [
        report.guided_risk,
        report.spec_fidelity,
        report.content_fidelity,
        report.removal_prob_b,
        report.raw_prob_b,
        report.probe_accuracy,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return Err(Error::OutOfRange(format!("non-finite metric in {report:?}")));
    }
    Ok(report)
}

/// Tiles square images row-major into one grayscale picture.
fn tile(cells: &[Vec<Vec<f64>>]) -> (u32, u32, Vec<f64>) {
    let side = IMAGE_SIDE;
    let rows = cells.len();
    let cols = cells[0].len();
    let (w, h) = (cols * side, rows * side);
    let mut px = vec![0.0; w * h];
    for (r, row) in cells.iter().enumerate() {
        for (c, img) in row.iter().enumerate() {
            for y in 0..side {
                let dst = (r * side + y) * w + c * side;
                px[dst..dst + side].copy_from_slice(&img[y * side..(y + 1) * side]);
            }
        }
    }
    (w as u32, h as u32, px)
}

fn require_image(world: &World) -> Result<()> {
    world.as_image().map(|_| ()).ok_or(Error::NotImageWorld)
}

fn stamp_text(stamp: Option<&str>) -> Vec<(&str, &str)> {
    stamp.map(|s| vec![("config_hash", s)]).unwrap_or_default()
}

/// Mix-and-match grid: sources across the top row, guides down the left
/// column, `translate(source, guide)` in the body, blank corner.
pub fn export_grid(
    t: &dyn Translator,
    world: &World,
    sources: &[Sample],
    guides: &[Sample],
    path: &Path,
    stamp: Option<&str>,
) -> Result<()> {
    require_image(world)?;
    if sources.is_empty() || guides.is_empty() {
        return Err(Error::EmptyBatch("grid needs at least one source and one guide"));
    }
    let blank = vec![0.0; IMAGE_SIDE * IMAGE_SIDE];
    let mut cells = vec![std::iter::once(blank).chain(sources.iter().map(|s| s.data.clone())).collect::<Vec<_>>()];
    for g in guides {
        let mut row = vec![g.data.clone()];
        for s in sources {
            row.push(t.translate(s, g)?);
        }
        cells.push(row);
    }
    let (w, h, px) = tile(&cells);
    imageio::write_gray(path, w, h, &px, &stamp_text(stamp))
}

/// The `steps` frames `interpolate(a, b1, b2, t)` at uniform `t ∈ [0, 1]`.
pub fn interpolation_frames(model: &ModelBundle, a: &Sample, b1: &Sample, b2: &Sample, steps: usize) -> Result<Vec<Vec<f64>>> {
    if steps < 2 {
        return Err(Error::OutOfRange(format!("{steps} interpolation steps, need at least 2")));
    }
    (0..steps)
        .map(|k| model.interpolate(&a.data, &b1.data, &b2.data, k as f64 / (steps - 1) as f64))
        .collect()
}

/// One horizontal strip of interpolation frames.
pub fn export_interpolation(
    model: &ModelBundle,
    world: &World,
    a: &Sample,
    b1: &Sample,
    b2: &Sample,
    steps: usize,
    path: &Path,
    stamp: Option<&str>,
) -> Result<()> {
    require_image(world)?;
    let frames = interpolation_frames(model, a, b1, b2, steps)?;
    let (w, h, px) = tile(&[frames]);
    imageio::write_gray(path, w, h, &px, &stamp_text(stamp))
}

#[cfg(test)]
mod tests;
