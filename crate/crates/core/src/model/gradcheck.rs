use ndarray::ArrayView2;

use super::{Gradients, LossWeights, ModelBundle};
use crate::Result;

fn flat(g: &Gradients) -> Vec<f64> {
    [&g.e1, &g.e2, &g.g, &g.d]
        .iter()
        .flat_map(|n| n.params().copied().collect::<Vec<_>>())
        .collect()
}

fn nudge(m: &ModelBundle, i: usize, h: f64) -> ModelBundle {
    let mut out = m.clone();
    let p = [&mut out.e1, &mut out.e2, &mut out.g, &mut out.d]
        .into_iter()
        .flat_map(|n| n.params_mut())
        .nth(i)
        .expect("parameter index in range");
    *p += h;
    out
}

/// `‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖)` for the weighted
/// loss `w.a L_A + w.b L_B + w.d L_D`, with central differences of step
/// `1e-7` over every parameter. Quadratic in the parameter count; meant
/// for the tiny model.
pub fn gradient_error(m: &ModelBundle, xa: ArrayView2<f64>, xb: ArrayView2<f64>, w: LossWeights) -> Result<f64> {
    let f = |m: &ModelBundle| -> Result<f64> {
        let l = m.losses(xa, xb)?;
        Ok(w.a * l.l_a + w.b * l.l_b + w.d * l.l_d)
    };
    let (_, g) = m.loss_gradients(xa, xb, w)?;
    let analytic = flat(&g);
    let h = 1e-7;
    let numeric = (0..analytic.len())
        .map(|i| Ok((f(&nudge(m, i, h))? - f(&nudge(m, i, -h))?) / (2.0 * h)))
        .collect::<Result<Vec<f64>>>()?;
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let na: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nn: f64 = numeric.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(diff / na.max(nn).max(1e-12))
}
