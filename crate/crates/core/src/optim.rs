//! Adaptive-moment updates over [`Mlp`] parameters.

use serde::{Deserialize, Serialize};

use crate::model::Mlp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub config: AdamConfig,
    pub t: u64,
    m: Mlp,
    v: Mlp,
}

impl Adam {
    pub fn new(net: &Mlp, config: AdamConfig) -> Self {
        Self {
            config,
            t: 0,
            m: net.zeros_like(),
            v: net.zeros_like(),
        }
    }

    pub fn matches(&self, net: &Mlp) -> bool {
        self.m.sizes() == net.sizes()
    }

    /// Applies one bias-corrected update of `net` against `grad`.
    pub fn step(&mut self, net: &mut Mlp, grad: &Mlp) {
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        self.t += 1;
        let c1 = 1.0 - beta1.powi(self.t as i32);
        let c2 = 1.0 - beta2.powi(self.t as i32);
        self.m.zip_params_mut(grad, |m, g| *m = beta1 * *m + (1.0 - beta1) * g);
        self.v.zip_params_mut(grad, |v, g| *v = beta2 * *v + (1.0 - beta2) * g * g);
        let step: Vec<f64> = self
            .m
            .params()
            .zip(self.v.params())
            .map(|(m, v)| lr * (m / c1) / ((v / c2).sqrt() + eps))
            .collect();
        for (p, s) in net.params_mut().zip(step) {
            *p -= s;
        }
    }
}
