//! Small binary classifiers: the domain probe on shared codes and the
//! attribute classifier used by the removal protocol.

use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Activation, Mlp};
use crate::optim::{Adam, AdamConfig};
use crate::seeding::{stream, tag};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub hidden: Vec<usize>,
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Fraction of each class held out for the reported accuracy.
    pub holdout: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            steps: 1500,
            batch_size: 64,
            lr: 1e-3,
            holdout: 0.3,
        }
    }
}

/// An MLP with a logit head on standardized inputs; class 1 is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    mean: Array1<f64>,
    scale: Array1<f64>,
    net: Mlp,
    /// Accuracy on the held-out split at fit time.
    pub holdout_accuracy: f64,
}

impl Classifier {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    fn standardize(&self, x: ArrayView2<f64>) -> Array2<f64> {
        (&x - &self.mean) / &self.scale
    }

    /// Probability of class 1 per row.
    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "classifier input",
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        Ok(self
            .net
            .forward(self.standardize(x).view())
            .iter()
            .map(|&z| crate::model::sigmoid(z))
            .collect())
    }

    /// Fraction of rows of `x0` scored below ½ and of `x1` at or above ½.
    pub fn accuracy(&self, x0: ArrayView2<f64>, x1: ArrayView2<f64>) -> Result<f64> {
        let right = self.predict_proba(x0)?.iter().filter(|&&p| p < 0.5).count()
            + self.predict_proba(x1)?.iter().filter(|&&p| p >= 0.5).count();
        Ok(right as f64 / (x0.nrows() + x1.nrows()) as f64)
    }
}

fn take(x: ArrayView2<f64>, idx: &[usize]) -> Array2<f64> {
    x.select(Axis(0), idx)
}

/// Trains on a random split of each class and records held-out accuracy.
pub fn fit(x0: ArrayView2<f64>, x1: ArrayView2<f64>, cfg: &ProbeConfig, seed: u64) -> Result<Classifier> {
    if x0.nrows() < 2 || x1.nrows() < 2 {
        return Err(Error::EmptyDataset(if x0.nrows() < 2 { "0" } else { "1" }));
    }
    if x0.ncols() != x1.ncols() {
        return Err(Error::DimensionMismatch {
            what: "classifier classes",
            expected: x0.ncols(),
            got: x1.ncols(),
        });
    }
    let mut rng = stream(seed, &[tag("probe")]);
    let split = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let held = ((n as f64 * cfg.holdout).round() as usize).clamp(1, n - 1);
        let train = idx.split_off(held);
        (train, idx)
    };
    let (tr0, te0) = split(x0.nrows(), &mut rng);
    let (tr1, te1) = split(x1.nrows(), &mut rng);
    let (a0, a1) = (take(x0, &tr0), take(x1, &tr1));

    let all = concatenate![Axis(0), a0, a1];
    let mean = all.mean_axis(Axis(0)).expect("nonempty");
    let scale = all.std_axis(Axis(0), 0.0).mapv(|s| if s > 1e-12 { s } else { 1.0 });

    let sizes: Vec<usize> = std::iter::once(x0.ncols())
        .chain(cfg.hidden.iter().copied())
        .chain(std::iter::once(1))
        .collect();
    let net = Mlp::new(&sizes, Activation::LeakyRelu { slope: 0.2 }, Activation::Identity, &mut rng);
    let mut clf = Classifier {
        mean,
        scale,
        net,
        holdout_accuracy: f64::NAN,
    };
    let (s0, s1) = (clf.standardize(a0.view()), clf.standardize(a1.view()));
    let mut opt = Adam::new(
        &clf.net,
        AdamConfig {
            lr: cfg.lr,
            beta1: 0.9,
            ..AdamConfig::default()
        },
    );
    let half = (cfg.batch_size / 2).max(1);
    for _ in 0..cfg.steps {
        let i0: Vec<usize> = (0..half).map(|_| rng.random_range(0..s0.nrows())).collect();
        let i1: Vec<usize> = (0..half).map(|_| rng.random_range(0..s1.nrows())).collect();
        let x = concatenate![Axis(0), s0.select(Axis(0), &i0), s1.select(Axis(0), &i1)];
        let trace = clf.net.forward_trace(x.view());
        let n = x.nrows() as f64;
        let mut grad_out = trace.output().mapv(|z| crate::model::sigmoid(z) / n);
        for r in half..2 * half {
            grad_out[[r, 0]] -= 1.0 / n;
        }
        let mut grad = clf.net.zeros_like();
        clf.net.backward(&trace, grad_out, &mut grad);
        opt.step(&mut clf.net, &grad);
    }
    clf.holdout_accuracy = clf.accuracy(take(x0, &te0).view(), take(x1, &te1).view())?;
    Ok(clf)
}
