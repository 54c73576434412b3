use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

const PSD_TOLERANCE: f64 = 1e-8;

/// Mean and covariance of a continuous vector, the substrate for the
/// closed-form Gaussian total correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianSummary {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                what: "covariance",
                expected: n,
                got: cov.nrows(),
            });
        }
        let scale = cov.diagonal().amax().max(1.0);
        if (&cov - cov.transpose()).amax() > PSD_TOLERANCE * scale {
            return Err(Error::NotPositiveDefinite);
        }
        let sym = (&cov + cov.transpose()) * 0.5;
        let min_eig = sym.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOLERANCE * scale {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            cov: sym,
        })
    }

    /// Sample mean and (unbiased) covariance of row vectors.
    pub fn from_samples<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::EmptyBatch("need at least two samples for a covariance"));
        }
        let dim = rows[0].as_ref().len();
        let mut mean = vec![0.0; dim];
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "sample",
                    expected: dim,
                    got: r.len(),
                });
            }
            for (m, &x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for r in rows {
            let centered = DVector::from_iterator(
                dim,
                r.as_ref().iter().zip(&mean).map(|(x, m)| x - m),
            );
            cov.ger(1.0, &centered, &centered, 1.0);
        }
        cov /= (n - 1) as f64;
        Self::new(mean, cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Adds `eps · mean(diag Σ)` to the diagonal. Used by training
    /// diagnostics, where learned codes can be rank deficient.
    pub fn with_ridge(&self, eps: f64) -> Self {
        let avg = self.cov.diagonal().mean().max(f64::MIN_POSITIVE);
        let mut cov = self.cov.clone();
        for i in 0..cov.nrows() {
            cov[(i, i)] += eps * avg;
        }
        Self {
            mean: self.mean.clone(),
            cov,
        }
    }
}

fn log_det_pd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let ld: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    if ld.is_finite() {
        Ok(ld)
    } else {
        Err(Error::NotPositiveDefinite)
    }
}

/// `½ (Σ_i ln Σ_ii − ln det Σ)`: the total correlation of a Gaussian with
/// covariance `Σ`.
pub fn gaussian_tc(s: &GaussianSummary) -> Result<f64> {
    let ld = log_det_pd(&s.cov)?;
    let diag: f64 = s.cov.diagonal().iter().map(|d| d.ln()).sum();
    Ok((0.5 * (diag - ld)).max(0.0))
}

/// Dependence between the first `split` coordinates and the rest, under a
/// Gaussian fit: `½ (ln det Σ₁₁ + ln det Σ₂₂ − ln det Σ)`.
pub fn gaussian_block_tc(s: &GaussianSummary, split: usize) -> Result<f64> {
    let n = s.dim();
    if split == 0 || split >= n {
        return Err(Error::InvalidDimensions(format!(
            "block split {split} for dimension {n}"
        )));
    }
    let a = s.cov.view((0, 0), (split, split)).into_owned();
    let b = s.cov.view((split, split), (n - split, n - split)).into_owned();
    let v = log_det_pd(&a)? + log_det_pd(&b)? - log_det_pd(&s.cov)?;
    Ok((0.5 * v).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::{total_correlation, DiscreteJoint};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn corr2(rho: f64) -> GaussianSummary {
        GaussianSummary::new(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]))
            .unwrap()
    }

    #[test]
    fn diagonal_covariance_has_zero_tc() {
        let s = GaussianSummary::new(
            vec![0.0; 3],
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0, 0.25])),
        )
        .unwrap();
        assert!(gaussian_tc(&s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn correlated_pair_closed_form() {
        let tc = gaussian_tc(&corr2(0.8)).unwrap();
        assert!((tc - (-0.5 * 0.36f64.ln())).abs() < 1e-10);
        assert!((tc - 0.510_825_623_765_990_7).abs() < 1e-10);
        assert!((gaussian_block_tc(&corr2(0.8), 1).unwrap() - tc).abs() < 1e-12);
    }

    #[test]
    fn degenerate_correlation_is_flagged() {
        assert!(matches!(gaussian_tc(&corr2(1.0)), Err(Error::NotPositiveDefinite)));
        assert!(GaussianSummary::new(
            vec![0.0, 0.0],
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])
        )
        .is_err());
    }

    #[test]
    fn tc_invariant_under_componentwise_affine_maps() {
        let base = corr2(0.6);
        let scale = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -0.2]));
        let mapped = GaussianSummary::new(vec![1.0, -2.0], &scale * base.cov() * &scale).unwrap();
        let a = gaussian_tc(&base).unwrap();
        let b = gaussian_tc(&mapped).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    /// Binned TC of sampled correlated Gaussians approaches the closed form.
    #[test]
    fn binned_estimate_agrees_with_closed_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let rho: f64 = 0.8;
        let bins = 24usize;
        let mut w = vec![0.0; bins * bins];
        let bin = |x: f64| (((x + 4.0) / 8.0 * bins as f64).floor().clamp(0.0, (bins - 1) as f64)) as usize;
        let n = 400_000;
        let mut rows = Vec::with_capacity(2000);
        for i in 0..n {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let x = z1;
            let y = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
            w[bin(x) * bins + bin(y)] += 1.0;
            if i < 2000 {
                rows.push(vec![x, y]);
            }
        }
        let binned = total_correlation(&DiscreteJoint::from_weights(vec![bins, bins], w).unwrap()).unwrap();
        let closed = gaussian_tc(&corr2(rho)).unwrap();
        assert!((binned - closed).abs() < 0.03, "binned {binned} closed {closed}");
        let fitted = gaussian_tc(&GaussianSummary::from_samples(&rows).unwrap()).unwrap();
        assert!((fitted - closed).abs() < 0.05);
    }
}
