use serde::{Deserialize, Serialize};

use super::xlogx;
use crate::{Error, Result};

const TOTAL_TOLERANCE: f64 = 1e-12;

/// A probability table over the product of finite alphabets.
///
/// Axis `i` ranges over `0..axes[i]`; the table is stored row-major with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteJoint {
    axes: Vec<usize>,
    pmf: Vec<f64>,
}

impl DiscreteJoint {
    pub fn new(axes: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidPmf("at least one axis is required".into()));
        }
        if axes.contains(&0) {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        let size: usize = axes.iter().product();
        if pmf.len() != size {
            return Err(Error::InvalidPmf(format!(
                "table has {} entries, axes imply {size}",
                pmf.len()
            )));
        }
        if let Some(bad) = pmf.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf(format!("entry {bad} is not a probability")));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > TOTAL_TOLERANCE {
            return Err(Error::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(Self { axes, pmf })
    }

    /// Normalizes nonnegative weights into a table.
    pub fn from_weights(axes: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidPmf(format!("weights sum to {total}")));
        }
        Self::new(axes, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(axes: Vec<usize>) -> Result<Self> {
        let size: usize = axes.iter().product();
        Self::from_weights(axes, vec![1.0; size.max(1)])
    }

    /// Product of independent one-dimensional distributions.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let axes: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let mut pmf = vec![1.0];
        for m in marginals {
            pmf = pmf
                .iter()
                .flat_map(|&p| m.iter().map(move |&q| p * q))
                .collect();
        }
        Self::from_weights(axes, pmf)
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1];
        }
        strides
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (i, &n) in self.axes.iter().enumerate().rev() {
            idx[i] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(self.strides())
            .map(|(&i, s)| i * s)
            .sum()
    }

    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes[axis]];
        let stride = self.strides()[axis];
        let n = self.axes[axis];
        for (flat, &p) in self.pmf.iter().enumerate() {
            out[(flat / stride) % n] += p;
        }
        out
    }

    /// Marginal over a subset of axes, kept in the given order.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&k| k >= self.axes.len()) {
            return Err(Error::AxisCount(format!("cannot keep axes {keep:?}")));
        }
        let axes: Vec<usize> = keep.iter().map(|&k| self.axes[k]).collect();
        let size: usize = axes.iter().product();
        let mut pmf = vec![0.0; size];
        for (flat, &p) in self.pmf.iter().enumerate() {
            let idx = self.unravel(flat);
            let mut pos = 0;
            for &k in keep {
                pos = pos * self.axes[k] + idx[k];
            }
            pmf[pos] += p;
        }
        Ok(Self { axes, pmf })
    }

    /// Reorders axes; `order[i]` names the source axis that becomes axis `i`.
    pub fn transpose(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.axes.len()];
        if order.len() != self.axes.len() {
            return Err(Error::AxisCount(format!("order {order:?} is not a permutation")));
        }
        for &o in order {
            if o >= seen.len() || seen[o] {
                return Err(Error::AxisCount(format!("order {order:?} is not a permutation")));
            }
            seen[o] = true;
        }
        self.marginalize(order)
    }

    /// Relabels the values of each axis: value `v` on axis `i` becomes
    /// `perms[i][v]`. The discrete counterpart of a componentwise invertible
    /// map.
    pub fn relabel(&self, perms: &[Vec<usize>]) -> Result<Self> {
        if perms.len() != self.axes.len() {
            return Err(Error::AxisCount("one permutation per axis".into()));
        }
        for (perm, &n) in perms.iter().zip(&self.axes) {
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
                return Err(Error::InvalidPmf(format!("{perm:?} is not a permutation of 0..{n}")));
            }
        }
        let mut pmf = vec![0.0; self.pmf.len()];
        for (flat, &p) in self.pmf.iter().enumerate() {
            let idx: Vec<usize> = self
                .unravel(flat)
                .iter()
                .zip(perms)
                .map(|(&v, perm)| perm[v])
                .collect();
            pmf[self.ravel(&idx)] = p;
        }
        Ok(Self {
            axes: self.axes.clone(),
            pmf,
        })
    }
}

/// Shannon entropy of the full table.
pub fn entropy(p: &DiscreteJoint) -> f64 {
    -p.pmf.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// `H(target | given)` as `H(target, given) - H(given)`.
pub fn conditional_entropy(p: &DiscreteJoint, target: &[usize], given: &[usize]) -> Result<f64> {
    let both: Vec<usize> = target.iter().chain(given).copied().collect();
    Ok(entropy(&p.marginalize(&both)?) - entropy(&p.marginalize(given)?))
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)` for a two-axis table.
pub fn mutual_info(joint: &DiscreteJoint) -> Result<f64> {
    if joint.axes.len() != 2 {
        return Err(Error::AxisCount(format!(
            "mutual information needs 2 axes, got {}",
            joint.axes.len()
        )));
    }
    let hx = entropy_of(&joint.marginal(0));
    let hy = entropy_of(&joint.marginal(1));
    Ok((hx + hy - entropy(joint)).max(0.0))
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// A KL divergence that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    /// `p` puts mass where `q` has none.
    Infinite,
}

impl Divergence {
    pub fn value(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }
}

pub fn kl(p: &DiscreteJoint, q: &DiscreteJoint) -> Result<Divergence> {
    if p.axes != q.axes {
        return Err(Error::DomainMismatch(format!(
            "axes {:?} vs {:?}",
            p.axes, q.axes
        )));
    }
    let mut acc = 0.0;
    for (&a, &b) in p.pmf.iter().zip(&q.pmf) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(Divergence::Infinite);
            }
            acc += a * (a / b).ln();
        }
    }
    Ok(Divergence::Finite(acc.max(0.0)))
}

/// KL divergence between the table and the product of its own marginals.
pub fn total_correlation(joint: &DiscreteJoint) -> Result<f64> {
    if joint.axes.len() < 2 {
        return Err(Error::AxisCount(format!(
            "total correlation needs at least 2 axes, got {}",
            joint.axes.len()
        )));
    }
    let marginals: Vec<Vec<f64>> = (0..joint.axes.len()).map(|i| joint.marginal(i)).collect();
    let mut acc = 0.0;
    for (flat, &p) in joint.pmf.iter().enumerate() {
        if p > 0.0 {
            let prod: f64 = joint
                .unravel(flat)
                .iter()
                .zip(&marginals)
                .map(|(&v, m)| m[v])
                .product();
            acc += p * (p / prod).ln();
        }
    }
    Ok(acc.max(0.0))
}
