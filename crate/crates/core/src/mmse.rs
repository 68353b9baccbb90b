//! Linear MMSE detection and the Gaussian prior factors it feeds to α-BP.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Alphabet;
use crate::models::MimoInstance;
use crate::numeric::normalize_log;

/// Scale applied to `(HᵀH + σ_w² I)^{-1}` to form the posterior covariance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CovarianceScaling {
    /// `Σ̂ = (HᵀH + σ_w² I)^{-1} σ_w`
    #[default]
    Sigma,
    /// `Σ̂ = (HᵀH + σ_w² I)^{-1} σ_w²`, the textbook Gaussian posterior.
    SigmaSquared,
}

impl std::str::FromStr for CovarianceScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Self::Sigma),
            "sigma_squared" | "sigma-squared" => Ok(Self::SigmaSquared),
            other => Err(Error::InvalidConfig(format!("unknown covariance scaling `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsePosterior {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

/// Gaussian posterior `N(μ̂, Σ̂)` with `μ̂ = (HᵀH + σ_w² I)^{-1} Hᵀy`.
///
/// Both the mean and the covariance come from one Cholesky factorization;
/// no explicit inverse is formed for the mean.
pub fn mmse_posterior(instance: &MimoInstance, scaling: CovarianceScaling) -> Result<MmsePosterior> {
    let sigma = instance.sigma_w();
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma_w must be positive, got {sigma}")));
    }
    let h = instance.channel();
    let n = instance.n();
    let regularized = h.transpose() * h + DMatrix::identity(n, n) * (sigma * sigma);
    let rhs = h.transpose() * instance.observation();
    let chol = regularized.cholesky().ok_or(Error::Factorization)?;
    let mean = chol.solve(&rhs);
    let inverse = chol.solve(&DMatrix::identity(n, n));
    let scale = match scaling {
        CovarianceScaling::Sigma => sigma,
        CovarianceScaling::SigmaSquared => sigma * sigma,
    };
    let covariance = (&inverse + inverse.transpose()) * (0.5 * scale);
    Ok(MmsePosterior { mean, covariance })
}

/// Nearest alphabet value to each `μ̂_i`, ties to the lower index.
pub fn mmse_decide(posterior: &MmsePosterior, alphabet: &Alphabet) -> Vec<usize> {
    posterior.mean.iter().map(|&mu| alphabet.nearest(mu)).collect()
}

/// Prior tables `p̂_i(a) ∝ exp{-(a - μ̂_i)² / (2 Σ̂_ii)}`, normalized.
pub fn mmse_prior_factors(posterior: &MmsePosterior, alphabet: &Alphabet) -> Result<Vec<Vec<f64>>> {
    posterior
        .mean
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let var = posterior.covariance[(i, i)];
            if !(var > 0.0 && var.is_finite()) {
                return Err(Error::NonPositiveEntry {
                    what: format!("posterior variance {i}"),
                    value: var,
                });
            }
            let mut logs: Vec<f64> = alphabet
                .values()
                .iter()
                .map(|&a| -(a - mu) * (a - mu) / (2.0 * var))
                .collect();
            normalize_log(&mut logs);
            // keep the table strictly positive for the engine
            let mut p: Vec<f64> = logs.into_iter().map(|l| l.exp().max(f64::MIN_POSITIVE)).collect();
            let z: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= z);
            Ok(p)
        })
        .collect()
}
