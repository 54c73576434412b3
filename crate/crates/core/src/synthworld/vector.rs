use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Mixing, WorldConfig};
use crate::seeding::{stream, tag};

/// Parameters live on the dyadic grid `k / 2^LATTICE_BITS`, so decoding can
/// snap back to the exact values used for rendering.
pub const LATTICE_BITS: u32 = 20;
const LATTICE: f64 = (1u64 << LATTICE_BITS) as f64;
const EDGE: f64 = 1e-12;

pub(crate) fn draw_lattice<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0..=(1u64 << LATTICE_BITS)) as f64 / LATTICE
}

fn snap(v: f64) -> f64 {
    ((v * LATTICE).round() / LATTICE).clamp(0.0, 1.0)
}

/// Vector-family renderer: parameters padded to the ambient dimension, then
/// either copied or rotated and squashed into `(0, 1)`.
#[derive(Debug, Clone)]
pub struct VectorWorld {
    content_dim: usize,
    spec_dim: usize,
    ambient_dim: usize,
    absent: f64,
    rotation: Option<DMatrix<f64>>,
}

impl VectorWorld {
    pub(crate) fn new(cfg: &WorldConfig, seed: u64) -> Self {
        let rotation = match cfg.mixing {
            Mixing::Identity => None,
            Mixing::Orthogonal => Some(random_orthogonal(cfg.ambient_dim, seed)),
        };
        Self {
            content_dim: cfg.content_dim,
            spec_dim: cfg.spec_dim,
            ambient_dim: cfg.ambient_dim,
            absent: cfg.absent_spec_value,
            rotation,
        }
    }

    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        self.rotation.as_ref()
    }

    fn latent(&self, content: &[f64], spec: Option<&[f64]>) -> Vec<f64> {
        let mut z = vec![0.0; self.ambient_dim];
        z[..self.content_dim].copy_from_slice(content);
        let slots = &mut z[self.content_dim..self.content_dim + self.spec_dim];
        match spec {
            Some(s) => slots.copy_from_slice(s),
            None => slots.fill(self.absent),
        }
        z
    }

    pub(crate) fn render(&self, content: &[f64], spec: Option<&[f64]>) -> Vec<f64> {
        let z = self.latent(content, spec);
        match &self.rotation {
            None => z,
            Some(q) => (0..self.ambient_dim)
                .map(|i| {
                    let t: f64 = (0..self.ambient_dim).map(|j| q[(i, j)] * z[j]).sum();
                    0.5 + 0.5 * t.tanh()
                })
                .collect(),
        }
    }

    fn invert(&self, data: &[f64]) -> Vec<f64> {
        match &self.rotation {
            None => data.to_vec(),
            Some(q) => {
                let t: Vec<f64> = data
                    .iter()
                    .map(|&x| (2.0 * x.clamp(EDGE, 1.0 - EDGE) - 1.0).atanh())
                    .collect();
                (0..self.ambient_dim)
                    .map(|j| (0..self.ambient_dim).map(|i| q[(i, j)] * t[i]).sum())
                    .collect()
            }
        }
    }

    fn residual(&self, params: &[f64], data: &[f64]) -> f64 {
        let (c, s) = params.split_at(self.content_dim);
        let x = self.render(c, Some(s));
        x.iter().zip(data).map(|(a, b)| (a - b).abs()).sum::<f64>() / data.len() as f64
    }

    /// Analytic inverse, snapped to the lattice; off-manifold inputs are then
    /// refined by a shrinking coordinate search on the ambient L1 gap.
    pub(crate) fn decompose(&self, data: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let z = self.invert(data);
        let k = self.content_dim + self.spec_dim;
        // identity mixing reads parameters straight off; rotated data went
        // through tanh, so snapping removes the rounding it introduced
        let mut params: Vec<f64> = match self.rotation {
            None => z[..k].iter().map(|&v| v.clamp(0.0, 1.0)).collect(),
            Some(_) => z[..k].iter().map(|&v| snap(v)).collect(),
        };
        let mut best = self.residual(&params, data);
        if best > 0.0 {
            let mut step = 1.0 / 64.0;
            while step >= 1.0 / LATTICE {
                for _ in 0..64 {
                    let mut improved = false;
                    for j in 0..k {
                        for dir in [-1.0, 1.0] {
                            let old = params[j];
                            params[j] = (old + dir * step).clamp(0.0, 1.0);
                            let r = self.residual(&params, data);
                            if r < best {
                                best = r;
                                improved = true;
                            } else {
                                params[j] = old;
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                step *= 0.5;
            }
        }
        let spec = params.split_off(self.content_dim);
        (params, spec, best)
    }
}

fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream(seed, &[tag("mixing")]);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::super::{gen_world, ContentParams, Domain, SpecParams, WorldConfig};
    use super::*;

    #[test]
    fn rotation_is_orthogonal() {
        let w = VectorWorld::new(&WorldConfig::vector(4, 2, 8), 9);
        let q = w.rotation().unwrap();
        let err = (q.transpose() * q - DMatrix::<f64>::identity(8, 8)).amax();
        assert!(err < 1e-12);
    }

    #[test]
    fn roundtrip_is_bit_exact_on_generated_samples() {
        let w = gen_world(&WorldConfig::vector(4, 2, 8), 2).unwrap();
        for b in w.sample_domain(Domain::B, 200, 4) {
            let d = w.decompose(&b).unwrap();
            assert!(!d.projected);
            assert_eq!(d.content, b.hidden_content);
            assert_eq!(Some(&d.spec), b.hidden_spec.as_ref());
            let again = w.compose(&d.content, &d.spec).unwrap();
            assert_eq!(again.data, b.data);
        }
    }

    #[test]
    fn off_lattice_parameters_decode_within_half_a_step() {
        let w = gen_world(&WorldConfig::vector(2, 1, 4), 2).unwrap();
        let c = ContentParams::new(vec![0.123_456_789, 0.987_654_321]).unwrap();
        let s = SpecParams::new(vec![0.333_333_333]).unwrap();
        let d = w.decompose(&w.compose(&c, &s).unwrap()).unwrap();
        let (tc, _) = w.param_tolerance();
        assert!(c.values().iter().zip(d.content.values()).all(|(a, b)| (a - b).abs() <= tc[0] + 1e-15));
        assert!(d.residual < 1e-6);
    }

    #[test]
    fn off_manifold_input_is_projected() {
        let w = gen_world(&WorldConfig::vector(4, 2, 8), 2).unwrap();
        let b = &w.sample_domain(Domain::B, 1, 0)[0];
        let noisy: Vec<f64> = b
            .data
            .iter()
            .enumerate()
            .map(|(i, x)| x + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let d = w.decompose_data(&noisy).unwrap();
        assert!(d.projected);
        assert!(d.residual <= 0.01 + 1e-12);
        assert!(d.content.mean_abs_diff(&b.hidden_content) < 0.05);
    }
}
