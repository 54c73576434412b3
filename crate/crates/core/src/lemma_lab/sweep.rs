use serde::{Deserialize, Serialize};

use crate::infotheory::q_alpha;
use crate::model::{data_matrix, ModelBundle, NoiseConfig};
use crate::seeding::{derive, tag};
use crate::synthworld::{Domain, World};
use crate::trainer::code_dependence;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub q: f64,
    /// Gaussian block TC between `e1(b)` and `e2(b)` under the perturbed
    /// encoders.
    pub tc: f64,
    /// Mean `‖g(e1(b), e2(b)) − b‖₁`.
    pub risk: f64,
}

/// Perturbs the encoders at each noise level and measures code dependence
/// and reconstruction on the same `samples` draws from domain B. The
/// rows are for inspection next to `q(α)`; nothing is asserted.
pub fn sweep_alpha_tc(model: &ModelBundle, world: &World, alphas: &[f64], samples: usize, seed: u64) -> Result<Vec<SweepRow>> {
    if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) || alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(format!("noise grid {alphas:?} must be positive and increasing")));
    }
    if samples < 2 {
        return Err(Error::EmptyBatch("sweep needs at least two samples"));
    }
    let xb = data_matrix(&world.sample_domain(Domain::B, samples, derive(seed, &[tag("sweep-data")])));
    alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let m = model.perturb_weights(&NoiseConfig::new(alpha)?, derive(seed, &[tag("sweep"), i as u64]))?;
            Ok(SweepRow {
                alpha,
                q: q_alpha(alpha)?,
                tc: code_dependence(&m, xb.view())?,
                risk: m.loss_b(xb.view())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;
    use crate::synthworld::{gen_world, WorldConfig};

    fn setup() -> (ModelBundle, World) {
        (
            ModelBundle::new(ModelConfig::default()).unwrap(),
            gen_world(&WorldConfig::default(), 3).unwrap(),
        )
    }

    #[test]
    fn q_column_decreases_and_tiny_noise_is_inert() {
        let (m, w) = setup();
        let rows = sweep_alpha_tc(&m, &w, &[1e-6, 0.1, 0.5, 1.0, 2.0], 400, 0).unwrap();
        assert!(rows.windows(2).all(|p| p[1].q < p[0].q));
        let xb = data_matrix(&w.sample_domain(Domain::B, 400, derive(0, &[tag("sweep-data")])));
        let (tc, risk) = (code_dependence(&m, xb.view()).unwrap(), m.loss_b(xb.view()).unwrap());
        assert!((rows[0].tc - tc).abs() <= 0.01 * tc.abs(), "{} vs {tc}", rows[0].tc);
        assert!((rows[0].risk - risk).abs() <= 0.01 * risk, "{} vs {risk}", rows[0].risk);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let (m, w) = setup();
        assert!(sweep_alpha_tc(&m, &w, &[0.5, 0.1], 10, 0).is_err());
        assert!(sweep_alpha_tc(&m, &w, &[0.0], 10, 0).is_err());
        assert!(sweep_alpha_tc(&m, &w, &[0.1], 1, 0).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let (m, w) = setup();
        let a = sweep_alpha_tc(&m, &w, &[0.1, 1.0], 50, 7).unwrap();
        assert_eq!(a, sweep_alpha_tc(&m, &w, &[0.1, 1.0], 50, 7).unwrap());
    }
}
