use super::instance::{DiscreteInstance, Loss};
use super::{Flag, LemmaId, VerificationReport};
use crate::infotheory::{discrepancy_with, total_correlation, DiscreteJoint, FunctionClass};
use crate::{Error, Result};

/// Largest decoder class the theorem check enumerates pairwise.
pub const MAX_DECODERS: usize = 1024;

/// Code distributions `f∘D_{A,B}` and `f∘D_{B,B̂}` on the flattened grid.
fn code_laws(inst: &DiscreteInstance) -> Result<(DiscreteJoint, DiscreteJoint)> {
    let n = inst.g1 * inst.g2;
    let (mut ab, mut bb) = (vec![0.0; n], vec![0.0; n]);
    for (a, &pa) in inst.d_a.iter().enumerate() {
        for (b, &pb) in inst.d_b.iter().enumerate() {
            ab[inst.code(inst.e1_a[a], inst.e2_b[b])] += pa * pb;
        }
    }
    for (b, &pb) in inst.d_b.iter().enumerate() {
        bb[inst.code(inst.e1_b[b], inst.e2_b[b])] += pb;
    }
    let axes = vec![inst.g1, inst.g2];
    Ok((DiscreteJoint::from_weights(axes.clone(), ab)?, DiscreteJoint::from_weights(axes, bb)?))
}

/// `(R_{D_{A,B}}[g_k∘f, y], R_{D_{B,B̂}}[g_k∘f, y])` for decoder `k`.
fn risks(inst: &DiscreteInstance, k: usize) -> (f64, f64) {
    let dec = &inst.decoders;
    let mut r_ab = 0.0;
    for (a, &pa) in inst.d_a.iter().enumerate() {
        for (b, &pb) in inst.d_b.iter().enumerate() {
            let out = dec.apply(k, inst.code(inst.e1_a[a], inst.e2_b[b]));
            r_ab += pa * pb * inst.loss.eval(out, inst.y(a, b));
        }
    }
    let r_bb = inst
        .d_b
        .iter()
        .enumerate()
        .map(|(b, &pb)| pb * inst.loss.eval(dec.apply(k, inst.code(inst.e1_b[b], inst.e2_b[b])), &inst.x_b[b]))
        .sum();
    (r_ab, r_bb)
}

/// Risk of `h` on mixed pairs against its self-reconstruction risk plus the
/// best joint approximation error plus the code-law discrepancy.
pub fn verify_thm1(inst: &DiscreteInstance) -> Result<VerificationReport> {
    inst.validate()?;
    if inst.decoders.len() > MAX_DECODERS {
        return Err(Error::ClassTooLarge(format!(
            "{} decoders exceed {MAX_DECODERS}",
            inst.decoders.len()
        )));
    }
    let flags = match inst.loss {
        Loss::L1 => vec![],
        Loss::L2 => vec![Flag::TriangleInequality],
        Loss::Skewed => vec![Flag::AsymmetricLoss],
    };
    let (ab, bb) = code_laws(inst)?;
    let (lhs, recon) = risks(inst, inst.h);
    let approx = (0..inst.decoders.len())
        .map(|k| {
            let (a, b) = risks(inst, k);
            a + b
        })
        .fold(f64::INFINITY, f64::min);
    let disc = discrepancy_with(&ab, &bb, &inst.decoders, |u, v| inst.loss.eval(u, v))?.value;
    Ok(VerificationReport::inequality(LemmaId::Thm1, 0, lhs, recon + approx + disc, flags)
        .with("reconstruction", recon)
        .with("approximation", approx)
        .with("discrepancy", disc))
}

/// Discrepancy of the full code laws over all binary maps on `G1 × G2`
/// against the discrepancy of the shared-code laws over all binary maps on
/// `G1`.
pub fn verify_reduction(inst: &DiscreteInstance) -> Result<VerificationReport> {
    inst.validate()?;
    let (ab, bb) = code_laws(inst)?;
    let mut flags = vec![];
    let tc = total_correlation(&bb)?;
    if tc > 1e-12 {
        flags.push(Flag::IndependenceViolated);
    }
    let bits = || vec![vec![0.0], vec![1.0]];
    let l1 = |u: &[f64], v: &[f64]| (u[0] - v[0]).abs();
    let full = FunctionClass::all_functions(inst.g1 * inst.g2, bits())?;
    let lhs = discrepancy_with(&ab, &bb, &full, l1)?.value;

    let (mut pa, mut pb) = (vec![0.0; inst.g1], vec![0.0; inst.g1]);
    for (a, &p) in inst.d_a.iter().enumerate() {
        pa[inst.e1_a[a]] += p;
    }
    for (b, &p) in inst.d_b.iter().enumerate() {
        pb[inst.e1_b[b]] += p;
    }
    let shared = FunctionClass::all_functions(inst.g1, bits())?;
    let rhs = discrepancy_with(
        &DiscreteJoint::from_weights(vec![inst.g1], pa)?,
        &DiscreteJoint::from_weights(vec![inst.g1], pb)?,
        &shared,
        l1,
    )?
    .value;
    Ok(VerificationReport::inequality(LemmaId::Reduction, 0, lhs, rhs, flags).with("code_tc", tc))
}
