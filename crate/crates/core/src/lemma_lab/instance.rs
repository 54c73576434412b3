use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dirichlet_ones;
use crate::infotheory::FunctionClass;
use crate::seeding::{stream, tag};
use crate::{Error, Result};

/// Pointwise loss used by the theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    L1,
    /// Squared L2: symmetric but no triangle inequality.
    L2,
    /// Overshoot costs twice as much as undershoot.
    Skewed,
}

impl Loss {
    pub fn eval(self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .zip(v)
            .map(|(a, b)| match self {
                Loss::L1 => (a - b).abs(),
                Loss::L2 => (a - b) * (a - b),
                Loss::Skewed => 2.0 * (a - b).max(0.0) + (b - a).max(0.0),
            })
            .sum()
    }
}

/// Two tiny domains with everything tabulated: the hidden factorization of
/// `X_B`, the target map, both encoders as code tables, and an enumerated
/// decoder class over the code grid `G1 × G2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteInstance {
    pub x_a: Vec<Vec<f64>>,
    pub x_b: Vec<Vec<f64>>,
    pub d_a: Vec<f64>,
    pub d_b: Vec<f64>,
    /// `u1` on each point of `X_A`.
    pub content_a: Vec<usize>,
    /// `(u1, u2)` on each point of `X_B`; pairwise distinct.
    pub content_b: Vec<usize>,
    pub spec_b: Vec<usize>,
    /// `render[c][s]` is the point with content `c` and spec `s`;
    /// `y(a, b) = render[u1(a)][u2(b)]`.
    pub render: Vec<Vec<Vec<f64>>>,
    pub g1: usize,
    pub g2: usize,
    pub e1_a: Vec<usize>,
    pub e1_b: Vec<usize>,
    pub e2_b: Vec<usize>,
    /// Decoders on the flattened grid, `code = i * g2 + j`.
    pub decoders: FunctionClass,
    /// Index of the decoder used by `h`.
    pub h: usize,
    pub loss: Loss,
}

fn l1(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum()
}

impl DiscreteInstance {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDimensions(m.to_owned()));
        let (na, nb) = (self.x_a.len(), self.x_b.len());
        if na == 0 || nb == 0 {
            return bad("empty domain");
        }
        if self.d_a.len() != na || self.content_a.len() != na || self.e1_a.len() != na {
            return bad("tables over X_A disagree in length");
        }
        if [self.d_b.len(), self.content_b.len(), self.spec_b.len(), self.e1_b.len(), self.e2_b.len()]
            .iter()
            .any(|&n| n != nb)
        {
            return bad("tables over X_B disagree in length");
        }
        for d in [&self.d_a, &self.d_b] {
            if d.iter().any(|&p| !(p >= 0.0)) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidPmf(format!("{d:?}")));
            }
        }
        if self.e1_a.iter().chain(&self.e1_b).any(|&c| c >= self.g1) || self.e2_b.iter().any(|&c| c >= self.g2) {
            return bad("code outside the grid");
        }
        if self.decoders.domain_size() != self.g1 * self.g2 || self.h >= self.decoders.len() {
            return bad("decoder class does not match the code grid");
        }
        let ns = self.render.first().map_or(0, Vec::len);
        if self.content_a.iter().chain(&self.content_b).any(|&c| c >= self.render.len())
            || self.spec_b.iter().any(|&s| s >= ns)
        {
            return bad("hidden factor outside the render table");
        }
        for j in 0..nb {
            if self.x_b[j] != self.render[self.content_b[j]][self.spec_b[j]] {
                return bad("X_B point differs from its rendering");
            }
            for k in 0..j {
                if (self.content_b[j], self.spec_b[j]) == (self.content_b[k], self.spec_b[k]) {
                    return bad("u is not invertible on X_B");
                }
            }
        }
        if self.delta() <= 0.0 {
            return bad("X_B points coincide");
        }
        Ok(())
    }

    /// Minimum pairwise L1 distance within `X_B`.
    pub fn delta(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.x_b.len() {
            for k in 0..j {
                best = best.min(l1(&self.x_b[j], &self.x_b[k]));
            }
        }
        best
    }

    pub fn y(&self, a: usize, b: usize) -> &[f64] {
        &self.render[self.content_a[a]][self.spec_b[b]]
    }

    pub fn code(&self, i: usize, j: usize) -> usize {
        i * self.g2 + j
    }
}

const M: usize = 2;

fn point<R: Rng>(rng: &mut R) -> Vec<f64> {
    (0..M).map(|_| rng.random_range(0.0..1.0)).collect()
}

/// Three points per domain, a 2 × 2 code grid and every map from it into
/// four candidate outputs (256 decoders).
pub fn thm1_instance(seed: u64) -> Result<DiscreteInstance> {
    let mut rng = stream(seed, &[tag("thm1-instance")]);
    let (nc, ns) = (rng.random_range(2..=3usize), rng.random_range(2..=3usize));
    let render: Vec<Vec<Vec<f64>>> = (0..nc).map(|_| (0..ns).map(|_| point(&mut rng)).collect()).collect();
    let mut pairs: Vec<(usize, usize)> = (0..nc).flat_map(|c| (0..ns).map(move |s| (c, s))).collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(3);
    let (content_b, spec_b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let x_b = content_b.iter().zip(&spec_b).map(|(&c, &s)| render[c][s].clone()).collect();
    let content_a: Vec<usize> = (0..3).map(|_| rng.random_range(0..nc)).collect();
    let x_a = (0..3).map(|_| point(&mut rng)).collect();

    // half the candidates are renderings, so good decoders exist
    let mut codomain: Vec<Vec<f64>> = render.iter().flatten().cloned().collect();
    codomain.shuffle(&mut rng);
    codomain.truncate(2);
    codomain.extend((0..2).map(|_| point(&mut rng)));
    let (g1, g2) = (2, 2);
    let decoders = FunctionClass::all_functions(g1 * g2, codomain)?;
    let inst = DiscreteInstance {
        x_a,
        x_b,
        d_a: dirichlet_ones(&mut rng, 3),
        d_b: dirichlet_ones(&mut rng, 3),
        content_a,
        content_b,
        spec_b,
        render,
        g1,
        g2,
        e1_a: (0..3).map(|_| rng.random_range(0..g1)).collect(),
        e1_b: (0..3).map(|_| rng.random_range(0..g1)).collect(),
        e2_b: (0..3).map(|_| rng.random_range(0..g2)).collect(),
        h: rng.random_range(0..decoders.len()),
        decoders,
        loss: Loss::L1,
    };
    inst.validate()?;
    Ok(inst)
}

/// `X_B` is the code grid itself (one point per code pair) and `D_B` is a
/// product of independent code marginals, so `e1(b) ⊥ e2(b)` holds exactly.
pub fn reduction_instance(seed: u64) -> Result<DiscreteInstance> {
    let mut rng = stream(seed, &[tag("reduction-instance")]);
    let (g1, g2) = (rng.random_range(2..=3usize), rng.random_range(2..=3usize));
    let (p1, p2) = (dirichlet_ones(&mut rng, g1), dirichlet_ones(&mut rng, g2));
    let render: Vec<Vec<Vec<f64>>> = (0..g1)
        .map(|i| (0..g2).map(|j| vec![i as f64, j as f64]).collect())
        .collect();
    let (mut content_b, mut spec_b, mut d_b) = (vec![], vec![], vec![]);
    for i in 0..g1 {
        for j in 0..g2 {
            content_b.push(i);
            spec_b.push(j);
            d_b.push(p1[i] * p2[j]);
        }
    }
    let total: f64 = d_b.iter().sum();
    d_b.iter_mut().for_each(|p| *p /= total);
    let x_b = content_b.iter().zip(&spec_b).map(|(&c, &s)| render[c][s].clone()).collect();
    let decoders = FunctionClass::all_functions(g1 * g2, vec![vec![0.0], vec![1.0]])?;
    let inst = DiscreteInstance {
        x_a: (0..g1).map(|i| vec![i as f64, -1.0]).collect(),
        x_b,
        d_a: dirichlet_ones(&mut rng, g1),
        d_b,
        content_a: (0..g1).collect(),
        e1_a: (0..g1).collect(),
        e1_b: content_b.clone(),
        e2_b: spec_b.clone(),
        content_b,
        spec_b,
        render,
        g1,
        g2,
        h: 0,
        decoders,
        loss: Loss::L1,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_are_valid_and_reproducible() {
        for s in 0..20 {
            let a = thm1_instance(s).unwrap();
            assert_eq!(a, thm1_instance(s).unwrap());
            assert_eq!((a.x_a.len(), a.x_b.len()), (3, 3));
            assert!(a.decoders.len() <= 256);
            assert!(a.delta() > 0.0);
            reduction_instance(s).unwrap().validate().unwrap();
        }
        assert_ne!(thm1_instance(0).unwrap(), thm1_instance(1).unwrap());
    }

    #[test]
    fn losses_differ_in_symmetry() {
        let (u, v) = ([1.0, 0.0], [0.0, 0.5]);
        assert_eq!(Loss::L1.eval(&u, &v), Loss::L1.eval(&v, &u));
        assert_eq!(Loss::L2.eval(&u, &v), 1.25);
        assert_ne!(Loss::Skewed.eval(&u, &v), Loss::Skewed.eval(&v, &u));
    }

    #[test]
    fn non_invertible_factorization_is_rejected() {
        let mut inst = thm1_instance(3).unwrap();
        inst.content_b[1] = inst.content_b[0];
        inst.spec_b[1] = inst.spec_b[0];
        inst.x_b[1] = inst.x_b[0].clone();
        assert!(inst.validate().is_err());
    }
}
