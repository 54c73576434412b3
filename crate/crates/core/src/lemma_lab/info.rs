use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{dirichlet_ones, Flag, LemmaId, VerificationReport};
use crate::infotheory::{binary_entropy, entropy, mutual_info, total_correlation, DiscreteJoint};
use crate::seeding::{stream, tag};
use crate::{Error, Result};

/// A joint table of `(X, Y)` and a deterministic guess `F(y)` of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoInstance {
    pub joint: DiscreteJoint,
    pub decoder: Vec<usize>,
}

impl FanoInstance {
    /// `P[F(Y) = X]`.
    pub fn accuracy(&self) -> Result<f64> {
        let (nx, ny) = match self.joint.axes() {
            &[nx, ny] => (nx, ny),
            axes => return Err(Error::AxisCount(format!("need (X, Y), got {} axes", axes.len()))),
        };
        if self.decoder.len() != ny || self.decoder.iter().any(|&x| x >= nx) {
            return Err(Error::InvalidDimensions("decoder table does not map Y into X".into()));
        }
        Ok(self
            .decoder
            .iter()
            .enumerate()
            .map(|(y, &x)| self.joint.pmf()[x * ny + y])
            .sum())
    }
}

/// Uniform random table on `|X|, |Y| ∈ {2, 3, 4}` with the MAP decoder,
/// redrawn until the decoder is right at least half the time.
pub fn fano_instance(seed: u64) -> Result<FanoInstance> {
    let mut rng = stream(seed, &[tag("fano-instance")]);
    loop {
        let (nx, ny) = (rng.random_range(2..=4usize), rng.random_range(2..=4usize));
        let joint = DiscreteJoint::from_weights(vec![nx, ny], dirichlet_ones(&mut rng, nx * ny))?;
        let decoder = (0..ny)
            .map(|y| {
                (0..nx)
                    .max_by(|&a, &b| joint.pmf()[a * ny + y].total_cmp(&joint.pmf()[b * ny + y]).then(b.cmp(&a)))
                    .expect("nonempty")
            })
            .collect();
        let inst = FanoInstance { joint, decoder };
        if inst.accuracy()? >= 0.5 {
            return Ok(inst);
        }
    }
}

/// `q·H(X) − H(q) ≤ I(X; Y)` where `q` is the decoder's accuracy.
pub fn verify_fano(inst: &FanoInstance) -> Result<VerificationReport> {
    let q = inst.accuracy()?;
    let flags = if q < 0.5 { vec![Flag::QBelowHalf] } else { vec![] };
    let hx = entropy(&inst.joint.marginalize(&[0])?);
    let lhs = q * hx - binary_entropy(q)?;
    let rhs = mutual_info(&inst.joint)?;
    Ok(VerificationReport::inequality(LemmaId::Fano, 0, lhs, rhs, flags)
        .with("q", q)
        .with("entropy_x", hx))
}

/// Finitely many well-separated points and a stochastic autoencoder given
/// as a channel from points to a finite set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskInstance {
    pub points: Vec<Vec<f64>>,
    pub d_b: Vec<f64>,
    pub outputs: Vec<Vec<f64>>,
    /// `channel[b][o] = P[h(b) = outputs[o]]`.
    pub channel: Vec<Vec<f64>>,
    pub delta: f64,
}

fn l1(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum()
}

impl RiskInstance {
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.points.len() {
            for k in 0..j {
                best = best.min(l1(&self.points[j], &self.points[k]));
            }
        }
        best
    }

    /// `E‖h(b) − b‖₁`.
    pub fn risk(&self) -> f64 {
        let mut r = 0.0;
        for (b, row) in self.channel.iter().enumerate() {
            for (o, &p) in row.iter().enumerate() {
                r += self.d_b[b] * p * l1(&self.outputs[o], &self.points[b]);
            }
        }
        r
    }

    /// Index of the nearest point (lowest index on ties).
    pub fn project(&self, u: &[f64]) -> usize {
        (0..self.points.len())
            .min_by(|&a, &b| l1(u, &self.points[a]).total_cmp(&l1(u, &self.points[b])).then(a.cmp(&b)))
            .expect("nonempty")
    }

    fn joint(&self) -> Result<DiscreteJoint> {
        let no = self.outputs.len();
        if self.points.is_empty() || no == 0 || self.channel.len() != self.points.len() || self.d_b.len() != self.points.len() {
            return Err(Error::InvalidDimensions("risk instance tables disagree".into()));
        }
        let mut w = Vec::with_capacity(self.points.len() * no);
        for (b, row) in self.channel.iter().enumerate() {
            if row.len() != no || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidPmf(format!("channel row {b}")));
            }
            w.extend(row.iter().map(|&p| self.d_b[b] * p));
        }
        DiscreteJoint::new(vec![self.points.len(), no], w)
    }
}

const RISK_DIM: usize = 3;

/// Two to four random points with `Δ` just under their separation; each
/// point's output is a jittered copy of itself, with some probability of
/// leaking to another point's copy. Redrawn until `R ≤ Δ/2`.
pub fn riskinfo_instance(seed: u64) -> Result<RiskInstance> {
    let mut rng = stream(seed, &[tag("riskinfo-instance")]);
    loop {
        let n = rng.random_range(2..=4usize);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..RISK_DIM).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let mut inst = RiskInstance {
            points,
            d_b: dirichlet_ones(&mut rng, n),
            outputs: vec![],
            channel: vec![],
            delta: 0.0,
        };
        inst.delta = inst.min_separation() * (1.0 - 1e-6);
        let jitter = rng.random_range(0.0..1.0) * inst.delta / (2.0 * RISK_DIM as f64);
        inst.outputs = inst
            .points
            .iter()
            .map(|p| p.iter().map(|&x| x + rng.random_range(-jitter..=jitter)).collect())
            .collect();
        let leak = rng.random_range(0.0..0.3);
        inst.channel = (0..n)
            .map(|b| {
                let spill = dirichlet_ones(&mut rng, n - 1);
                let mut others = spill.into_iter();
                (0..n)
                    .map(|o| if o == b { 1.0 - leak } else { leak * others.next().expect("n - 1 entries") })
                    .collect()
            })
            .collect();
        if inst.risk() <= inst.delta / 2.0 {
            return Ok(inst);
        }
    }
}

/// `(1 − R/Δ)·H(b) − √(R/Δ) ≤ I(h(b); b)`.
pub fn verify_riskinfo(inst: &RiskInstance) -> Result<VerificationReport> {
    let joint = inst.joint()?;
    if !(inst.delta > 0.0) {
        return Err(Error::OutOfRange(format!("separation {} must be positive", inst.delta)));
    }
    let r = inst.risk();
    let mut flags = vec![];
    if inst.min_separation() <= inst.delta {
        flags.push(Flag::SeparationViolated);
    }
    if r > inst.delta / 2.0 {
        flags.push(Flag::RiskTooLarge);
    }
    let ratio = r / inst.delta;
    let hb = entropy(&joint.marginalize(&[0])?);
    let lhs = (1.0 - ratio) * hb - ratio.sqrt();
    let rhs = mutual_info(&joint)?;
    let mut hit = 0.0;
    for (b, row) in inst.channel.iter().enumerate() {
        for (o, &p) in row.iter().enumerate() {
            if inst.project(&inst.outputs[o]) == b {
                hit += inst.d_b[b] * p;
            }
        }
    }
    Ok(VerificationReport::inequality(LemmaId::Riskinfo, 0, lhs, rhs, flags)
        .with("risk", r)
        .with("delta", inst.delta)
        .with("projector_accuracy", hit))
}

/// A joint table and one permutation per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcInstance {
    pub joint: DiscreteJoint,
    pub perms: Vec<Vec<usize>>,
}

pub fn tc_instance(seed: u64) -> Result<TcInstance> {
    let mut rng = stream(seed, &[tag("tc-instance")]);
    let k = rng.random_range(2..=3usize);
    let axes: Vec<usize> = (0..k).map(|_| rng.random_range(2..=4usize)).collect();
    let size = axes.iter().product();
    let joint = DiscreteJoint::from_weights(axes.clone(), dirichlet_ones(&mut rng, size))?;
    let perms = axes
        .iter()
        .map(|&n| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    Ok(TcInstance { joint, perms })
}

/// Total correlation is unchanged by relabelling each axis.
pub fn verify_tc_invariance(inst: &TcInstance) -> Result<VerificationReport> {
    let before = total_correlation(&inst.joint)?;
    let after = total_correlation(&inst.joint.relabel(&inst.perms)?)?;
    Ok(VerificationReport::equality(LemmaId::TcInvariance, 0, after, before, vec![]))
}

/// Minimum sample count for the Monte Carlo check.
pub const XPLUSY_MIN_SAMPLES: usize = 10_000;
const BAND: f64 = 4.0;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample covariance with its standard error.
fn cov_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let c = mean(&prods);
    let var = prods.iter().map(|p| (p - c) * (p - c)).sum::<f64>() / (prods.len() - 1) as f64;
    (c, (var / prods.len() as f64).sqrt())
}

/// `X, Y ~ U[−1, 1]` independent, `Z = (X + Y)²`: all pairwise covariances
/// vanish, yet `Z` depends on `X`.
///
/// `lhs` is the largest band statistic (covariance and variance z-scores),
/// `rhs` the 4σ band. The slack also covers the dependence witness: the
/// conditional mean `E[Z | |X| > 0.9]` must sit more than 4σ from `E[Z]`.
pub fn verify_xplusy(n: usize, seed: u64) -> Result<VerificationReport> {
    if n < XPLUSY_MIN_SAMPLES {
        return Err(Error::OutOfRange(format!("{n} samples, need at least {XPLUSY_MIN_SAMPLES}")));
    }
    let mut rng = stream(seed, &[tag("xplusy")]);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        xs.push(rng.random_range(-1.0..=1.0));
        ys.push(rng.random_range(-1.0..=1.0));
    }
    let zs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y): (&f64, &f64)| (x + y).powi(2)).collect();

    let (cxy, sxy) = cov_se(&xs, &ys);
    let (cxz, sxz) = cov_se(&xs, &zs);
    let (cyz, syz) = cov_se(&ys, &zs);
    let (var_x, svar) = cov_se(&xs, &xs);
    let zscores = [cxy / sxy, cxz / sxz, cyz / syz, (var_x - 1.0 / 3.0) / svar];
    let lhs = zscores.iter().map(|z| z.abs()).fold(0.0, f64::max);

    let tail: Vec<f64> = xs.iter().zip(&zs).filter(|(x, _)| x.abs() > 0.9).map(|(_, &z)| z).collect();
    let spread = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
    };
    let (mz, mt) = (mean(&zs), mean(&tail));
    let witness_se = (spread(&tail) / tail.len() as f64 + spread(&zs) / n as f64).sqrt();
    let witness = (mt - mz).abs() / witness_se;

    let mut r = VerificationReport::inequality(LemmaId::Xplusy, seed, lhs, BAND, vec![])
        .with("n", n as f64)
        .with("cov_xy", cxy)
        .with("cov_xz", cxz)
        .with("cov_yz", cyz)
        .with("var_x", var_x)
        .with("mean_z", mz)
        .with("mean_z_tail", mt)
        .with("witness_z", witness);
    r.slack = r.slack.min(witness - BAND);
    r.pass = r.slack >= -r.tolerance;
    Ok(r)
}
