use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu { slope: f64 },
    Sigmoid,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu { slope } => {
                if z > 0.0 {
                    z
                } else {
                    slope * z
                }
            }
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative given the pre-activation `z` and the output `y`.
    fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu { slope } => {
                if z > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

/// One affine map `x ↦ W x + b`, with `W` stored as `out × in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// A fully connected network. Rows of every matrix are samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
    pub hidden: Activation,
    pub output: Activation,
}

/// Intermediate values kept for the backward pass.
pub struct Trace {
    /// `inputs[k]` feeds layer `k`; the last entry is the network output.
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
}

impl Trace {
    pub fn output(&self) -> &Array2<f64> {
        self.inputs.last().expect("trace holds at least the input")
    }
}

impl Mlp {
    /// `sizes = [in, h1, ..., out]`; weights and biases are drawn from
    /// `U(−1/√fan_in, 1/√fan_in)`.
    pub fn new<R: Rng>(sizes: &[usize], hidden: Activation, output: Activation, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "an mlp needs input and output sizes");
        let layers = sizes
            .windows(2)
            .map(|p| {
                // He-uniform weights; small biases keep pre-activations off the kink
                let fan_in = p[0] as f64;
                let (wb, bb) = ((6.0 / fan_in).sqrt(), 1.0 / fan_in.sqrt());
                Dense {
                    w: Array2::from_shape_fn((p[1], p[0]), |_| rng.random_range(-wb..wb)),
                    b: Array1::from_shape_fn(p[1], |_| rng.random_range(-bb..bb)),
                }
            })
            .collect();
        Self { layers, hidden, output }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Dense {
                    w: Array2::zeros(l.w.raw_dim()),
                    b: Array1::zeros(l.b.raw_dim()),
                })
                .collect(),
            hidden: self.hidden,
            output: self.output,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.w.nrows())
    }

    /// Layer sizes `[in, h1, ..., out]`.
    pub fn sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.w.nrows()))
            .collect()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    fn activation(&self, k: usize) -> Activation {
        if k + 1 == self.layers.len() {
            self.output
        } else {
            self.hidden
        }
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut h = x.to_owned();
        for (k, l) in self.layers.iter().enumerate() {
            let act = self.activation(k);
            h = h.dot(&l.w.t()) + &l.b;
            h.mapv_inplace(|z| act.apply(z));
        }
        h
    }

    pub fn forward_trace(&self, x: ArrayView2<f64>) -> Trace {
        let mut inputs = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for (k, l) in self.layers.iter().enumerate() {
            let act = self.activation(k);
            let z = inputs[k].dot(&l.w.t()) + &l.b;
            inputs.push(z.mapv(|v| act.apply(v)));
            pre.push(z);
        }
        Trace { inputs, pre }
    }

    /// Accumulates parameter gradients into `grad` and returns the gradient
    /// with respect to the input, given `∂L/∂output`.
    pub fn backward(&self, trace: &Trace, grad_out: Array2<f64>, grad: &mut Mlp) -> Array2<f64> {
        let mut delta = grad_out;
        for k in (0..self.layers.len()).rev() {
            let act = self.activation(k);
            Zip::from(&mut delta)
                .and(&trace.pre[k])
                .and(&trace.inputs[k + 1])
                .for_each(|d, &z, &y| *d *= act.derivative(z, y));
            let g = &mut grad.layers[k];
            g.w += &delta.t().dot(&trace.inputs[k]);
            g.b += &delta.sum_axis(Axis(0));
            delta = delta.dot(&self.layers[k].w);
        }
        delta
    }

    /// Visits every parameter paired with the matching entry of `other`.
    pub fn zip_params_mut(&mut self, other: &Mlp, mut f: impl FnMut(&mut f64, f64)) {
        for (l, o) in self.layers.iter_mut().zip(&other.layers) {
            Zip::from(&mut l.w).and(&o.w).for_each(|p, &q| f(p, q));
            Zip::from(&mut l.b).and(&o.b).for_each(|p, &q| f(p, q));
        }
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.w.iter_mut().chain(l.b.iter_mut()))
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(|l| l.w.iter().chain(l.b.iter()))
    }
}
