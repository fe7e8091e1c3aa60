//! Two-layer scenario tree for market conditions.
//!
//! The day-ahead layer samples the marginal distributions of the hourly
//! total load and of the per-unit wind production at each site. For each
//! day-ahead scenario, a nested balancing layer samples the forecast
//! errors that are settled in the balancing market: wind errors follow a
//! zero-mean beta law whose standard deviation grows with the forecast
//! level, load errors are zero-mean normal. Both layers are built from a
//! large raw sample and trimmed by scenario reduction.

mod reduce;
mod sampling;

pub use reduce::{reduce_scenarios, Reduction};
pub use sampling::{sample_balancing, sample_day_ahead, Pmf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("forecast p={0} outside [0, 1]")]
    ForecastOutOfRange(f64),
    #[error("kappa must be nonnegative, got {0}")]
    NegativeKappa(f64),
    #[error("sigma^2={sigma_sq} >= p(1-p)={limit}: beta moments infeasible")]
    InfeasibleMoments { sigma_sq: f64, limit: f64 },
    #[error("p={0} is degenerate for a beta fit; emit a point mass instead")]
    DegenerateForecast(f64),
    #[error("empty probability mass function")]
    EmptyPmf,
    #[error("pmf weight {weight} at value {value} is negative")]
    NegativeWeight { value: f64, weight: f64 },
    #[error("target count {target} outside 1..={available}")]
    BadTargetCount { target: usize, available: usize },
    #[error("scenario vectors must share one dimension (got {0} and {1})")]
    MixedDimensions(usize, usize),
    #[error("wind site `{0}` does not map to a network node")]
    UnknownSiteNode(String),
    #[error("probabilities sum to {0}, expected 1")]
    UnnormalizedProbabilities(f64),
}

/// Forecast-error law: `kappa` scales the wind-error standard deviation
/// between perfect forecast (0) and the base case (1); `load_error_std`
/// is the load-error standard deviation as a fraction of the load forecast.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorLaw {
    pub kappa: f64,
    pub load_error_std: f64,
}

/// Standard deviation of the wind power forecast error, 24 h ahead, as a
/// function of the per-unit forecast level.
pub fn wind_error_std(p: f64, kappa: f64) -> Result<f64, ScenarioError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScenarioError::ForecastOutOfRange(p));
    }
    if kappa < 0.0 {
        return Err(ScenarioError::NegativeKappa(kappa));
    }
    Ok(kappa * (0.01837 + 0.20355 * p))
}

/// Shape parameters of the beta distribution with mean `p` and standard
/// deviation `sigma`. The fit requires `sigma^2 < p(1-p)`.
pub fn beta_shape(p: f64, sigma: f64) -> Result<(f64, f64), ScenarioError> {
    if p <= 0.0 || p >= 1.0 {
        return Err(ScenarioError::DegenerateForecast(p));
    }
    let limit = p * (1.0 - p);
    let sigma_sq = sigma * sigma;
    if sigma_sq >= limit {
        return Err(ScenarioError::InfeasibleMoments { sigma_sq, limit });
    }
    let alpha = (1.0 - p) * p * p / sigma_sq - p;
    let beta = alpha * (1.0 - p) / p;
    Ok((alpha, beta))
}

/// A wind site: production connects at `node`; sites sharing a `driver`
/// index draw the same per-unit day-ahead value (perfect correlation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindSite {
    pub node: String,
    pub driver: usize,
}

/// One sampled day-ahead market state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DayAheadScenario {
    pub probability: f64,
    /// Total system load in p.u. of peak.
    pub load_pu: f64,
    /// Per-unit wind forecast per site, aligned with `ScenarioTree::sites`.
    pub wind_pu: Vec<f64>,
    pub balancing: Vec<BalancingScenario>,
}

/// One realization of the forecast errors nested under a day-ahead scenario.
/// Probabilities are conditional: they sum to one within each parent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalancingScenario {
    pub probability: f64,
    /// Signed total-load error in p.u. of peak.
    pub load_err_pu: f64,
    /// Realized per-unit wind per site.
    pub wind_pu: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioTree {
    pub seed: u64,
    pub sites: Vec<WindSite>,
    pub day_ahead: Vec<DayAheadScenario>,
}

impl ScenarioTree {
    /// Checks probability normalization per layer, value ranges and that
    /// every site maps to a node of `node_ids`.
    pub fn validate(&self, node_ids: &[String]) -> Result<(), ScenarioError> {
        for site in &self.sites {
            if !node_ids.contains(&site.node) {
                return Err(ScenarioError::UnknownSiteNode(site.node.clone()));
            }
        }
        let total: f64 = self.day_ahead.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::UnnormalizedProbabilities(total));
        }
        for s in &self.day_ahead {
            for &w in &s.wind_pu {
                if !(0.0..=1.0).contains(&w) {
                    return Err(ScenarioError::ForecastOutOfRange(w));
                }
            }
            if !s.balancing.is_empty() {
                let t: f64 = s.balancing.iter().map(|r| r.probability).sum();
                if (t - 1.0).abs() > 1e-9 {
                    return Err(ScenarioError::UnnormalizedProbabilities(t));
                }
            }
            for r in &s.balancing {
                for &w in &r.wind_pu {
                    if !(0.0..=1.0).contains(&w) {
                        return Err(ScenarioError::ForecastOutOfRange(w));
                    }
                }
            }
        }
        Ok(())
    }

    /// Collapses the balancing layer, keeping one zero-error branch per
    /// day-ahead scenario. Used by the single-stage investment model.
    pub fn day_ahead_only(&self) -> ScenarioTree {
        let mut tree = self.clone();
        for s in &mut tree.day_ahead {
            s.balancing = vec![BalancingScenario {
                probability: 1.0,
                load_err_pu: 0.0,
                wind_pu: s.wind_pu.clone(),
            }];
        }
        tree
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wind_error_std_formula() {
        // kappa = 0 annihilates regardless of p.
        assert_eq!(wind_error_std(0.73, 0.0).unwrap(), 0.0);
        // intercept read directly at p = 0.
        assert!((wind_error_std(0.0, 1.0).unwrap() - 0.01837).abs() < 1e-15);
        // sigma(0.5, 1) = 0.01837 + 0.20355 * 0.5.
        assert!((wind_error_std(0.5, 1.0).unwrap() - 0.120145).abs() < 1e-15);
        // linear in kappa, affine increasing in p.
        let s1 = wind_error_std(0.4, 1.0).unwrap();
        let s2 = wind_error_std(0.4, 2.5).unwrap();
        assert!((s2 - 2.5 * s1).abs() < 1e-15);
        assert!(wind_error_std(0.5, 1.0).unwrap() > wind_error_std(0.2, 1.0).unwrap());
        assert!(wind_error_std(1.2, 1.0).is_err());
        assert!(wind_error_std(0.5, -0.1).is_err());
    }

    #[test]
    fn beta_shape_symmetric_at_half() {
        let sigma = wind_error_std(0.5, 1.0).unwrap();
        let (a, b) = beta_shape(0.5, sigma).unwrap();
        assert!((a - b).abs() < 1e-12, "alpha = beta at p = 0.5");
        assert!((a - 8.1596).abs() < 1e-3, "alpha = {a}");
        // mean of the fitted beta is p by construction
        assert!((a / (a + b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn beta_shape_vanishing_variance_blows_up() {
        let (a1, b1) = beta_shape(0.5, 1e-3).unwrap();
        let (a2, b2) = beta_shape(0.5, 1e-6).unwrap();
        assert!(a2 > 1e5 * a1 * 0.9 && b2 > 1e5 * b1 * 0.9);
    }

    #[test]
    fn beta_shape_errors() {
        assert!(matches!(
            beta_shape(0.5, 0.5),
            Err(ScenarioError::InfeasibleMoments { .. })
        ));
        assert!(matches!(
            beta_shape(0.0, 0.1),
            Err(ScenarioError::DegenerateForecast(_))
        ));
        assert!(matches!(
            beta_shape(1.0, 0.1),
            Err(ScenarioError::DegenerateForecast(_))
        ));
    }

    #[test]
    fn beta_moments_recovered() {
        // second moment of Beta(a,b): var = ab / ((a+b)^2 (a+b+1))
        for (p, kappa) in [(0.2, 1.0), (0.5, 0.7), (0.8, 0.3)] {
            let sigma = wind_error_std(p, kappa).unwrap();
            let (a, b) = beta_shape(p, sigma).unwrap();
            let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
            assert!((var.sqrt() - sigma).abs() < 1e-10);
        }
    }
}
