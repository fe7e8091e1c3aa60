//! Sampling of the day-ahead layer (empirical distributions) and the
//! balancing layer (parametric forecast-error laws).
//!
//! All draws are reproducible: each day-ahead index gets its own ChaCha
//! stream derived from the tree seed, so results do not depend on how the
//! work is scheduled across threads.

use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Normal};

use super::{beta_shape, wind_error_std, BalancingScenario, DayAheadScenario, ErrorLaw, ScenarioError};

/// Discrete probability mass function over scalar values (e.g. a digitized
/// histogram of per-unit wind production). Weights are normalized at
/// construction.
#[derive(Debug, Clone)]
pub struct Pmf {
    values: Vec<f64>,
    cumulative: Vec<f64>,
    mean: f64,
}

impl Pmf {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self, ScenarioError> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(ScenarioError::EmptyPmf);
        }
        let mut total = 0.0;
        for (&v, &w) in values.iter().zip(&weights) {
            if w < 0.0 {
                return Err(ScenarioError::NegativeWeight { value: v, weight: w });
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(ScenarioError::EmptyPmf);
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        let mut mean = 0.0;
        for (&v, &w) in values.iter().zip(&weights) {
            acc += w / total;
            cumulative.push(acc);
            mean += v * w / total;
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Pmf {
            values,
            cumulative,
            mean,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let x: f64 = rng.gen();
        let idx = self
            .cumulative
            .partition_point(|&c| c < x)
            .min(self.values.len() - 1);
        self.values[idx]
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `n_samples` equiprobable day-ahead scenarios. Load and each wind
/// driver are sampled independently; `driver_of_site[k]` maps site `k` to
/// its shared driver pmf, so perfectly correlated sites reuse one draw.
pub fn sample_day_ahead(
    load_pmf: &Pmf,
    driver_pmfs: &[Pmf],
    driver_of_site: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<DayAheadScenario>, ScenarioError> {
    let prob = 1.0 / n_samples as f64;
    (0..n_samples)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let load_pu = load_pmf.sample(&mut rng);
            let draws: Vec<f64> = driver_pmfs.iter().map(|p| p.sample(&mut rng)).collect();
            let wind_pu = driver_of_site.iter().map(|&d| draws[d]).collect();
            Ok(DayAheadScenario {
                probability: prob,
                load_pu,
                wind_pu,
                balancing: Vec::new(),
            })
        })
        .collect()
}

/// Draws one realized per-unit wind value for forecast `p` under error
/// scale `kappa`. The error is beta-shaped with zero mean: the fitted
/// Beta(alpha, beta) has mean exactly `p`, so the realization is the raw
/// beta draw, clipped defensively to [0, 1].
///
/// Degenerate cases collapse to a point mass at the forecast. When the
/// requested sigma exceeds what a beta on [0,1] can carry, sigma is capped
/// just below the moment bound sqrt(p(1-p)).
pub fn sample_wind_realization<R: Rng>(
    p: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<f64, ScenarioError> {
    let sigma = wind_error_std(p, kappa)?;
    if sigma == 0.0 || p <= 0.0 || p >= 1.0 {
        return Ok(p);
    }
    let cap = 0.999 * (p * (1.0 - p)).sqrt();
    let (alpha, beta) = beta_shape(p, sigma.min(cap))?;
    let draw = Beta::new(alpha, beta).expect("positive shapes").sample(rng);
    Ok((p + (draw - p)).clamp(0.0, 1.0))
}

/// Draws `n_samples` equiprobable balancing scenarios under `parent`.
/// Per-site wind errors and the load error are independent.
pub fn sample_balancing(
    parent: &DayAheadScenario,
    law: &ErrorLaw,
    n_samples: usize,
    seed: u64,
    parent_stream: u64,
) -> Result<Vec<BalancingScenario>, ScenarioError> {
    if law.kappa < 0.0 {
        return Err(ScenarioError::NegativeKappa(law.kappa));
    }
    let mut rng = stream_rng(seed, (1 << 32) | parent_stream);
    let load_noise = if law.load_error_std > 0.0 {
        Some(Normal::new(0.0, law.load_error_std * parent.load_pu).expect("positive std"))
    } else {
        None
    };
    let prob = 1.0 / n_samples as f64;
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let wind_pu = parent
            .wind_pu
            .iter()
            .map(|&p| sample_wind_realization(p, law.kappa, &mut rng))
            .collect::<Result<Vec<f64>, _>>()?;
        let load_err_pu = match &load_noise {
            // realized load stays nonnegative
            Some(n) => n.sample(&mut rng).max(-parent.load_pu),
            None => 0.0,
        };
        out.push(BalancingScenario {
            probability: prob,
            load_err_pu,
            wind_pu,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(v: f64) -> Pmf {
        Pmf::new(vec![v], vec![1.0]).unwrap()
    }

    #[test]
    fn single_atom_pmfs_give_identical_scenarios() {
        let load = atom(0.8);
        let drivers = [atom(0.3), atom(0.6)];
        let s = sample_day_ahead(&load, &drivers, &[0, 1], 50, 7).unwrap();
        assert_eq!(s.len(), 50);
        for sc in &s {
            assert_eq!(sc.load_pu, 0.8);
            assert_eq!(sc.wind_pu, vec![0.3, 0.6]);
            assert!((sc.probability - 0.02).abs() < 1e-15);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let load = Pmf::new(vec![0.5, 0.8, 1.0], vec![1.0, 2.0, 1.0]).unwrap();
        let d = Pmf::new(vec![0.1, 0.5, 0.9], vec![1.0, 1.0, 1.0]).unwrap();
        let a = sample_day_ahead(&load, &[d.clone()], &[0], 100, 99).unwrap();
        let b = sample_day_ahead(&load, &[d.clone()], &[0], 100, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.load_pu, y.load_pu);
            assert_eq!(x.wind_pu, y.wind_pu);
        }
        let c = sample_day_ahead(&load, &[d], &[0], 100, 100).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| x.load_pu != y.load_pu
            || x.wind_pu != y.wind_pu));
    }

    #[test]
    fn correlated_sites_share_draws() {
        let load = atom(1.0);
        let d = Pmf::new(vec![0.1, 0.5, 0.9], vec![1.0, 1.0, 1.0]).unwrap();
        let s = sample_day_ahead(&load, &[d.clone(), d], &[0, 0, 1], 200, 3).unwrap();
        for sc in &s {
            assert_eq!(sc.wind_pu[0], sc.wind_pu[1]);
        }
        assert!(s.iter().any(|sc| sc.wind_pu[0] != sc.wind_pu[2]));
    }

    #[test]
    fn pmf_mean_matches_empirical() {
        let d = Pmf::new(vec![0.0, 0.25, 0.5, 1.0], vec![1.0, 3.0, 4.0, 2.0]).unwrap();
        let mut rng = stream_rng(5, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        // 3 standard errors of the mean
        let var: f64 = d
            .values()
            .iter()
            .zip([0.1, 0.3, 0.4, 0.2])
            .map(|(&v, w)| w * (v - d.mean()).powi(2))
            .sum::<f64>();
        let tol = 3.0 * (var / n as f64).sqrt();
        assert!(
            (mean - d.mean()).abs() < tol,
            "mean {mean} vs {} (tol {tol})",
            d.mean()
        );
    }

    #[test]
    fn zero_error_law_reproduces_forecast() {
        let parent = DayAheadScenario {
            probability: 1.0,
            load_pu: 0.9,
            wind_pu: vec![0.4, 0.7],
            balancing: vec![],
        };
        let law = ErrorLaw {
            kappa: 0.0,
            load_error_std: 0.0,
        };
        for r in sample_balancing(&parent, &law, 20, 11, 0).unwrap() {
            assert_eq!(r.wind_pu, parent.wind_pu);
            assert_eq!(r.load_err_pu, 0.0);
        }
    }

    #[test]
    fn wind_error_moments_match_law() {
        // sample std of the error close to sigma(p, kappa); mean close to 0.
        let n = 100_000;
        for (p, kappa) in [(0.2, 1.0), (0.5, 1.0), (0.8, 0.5)] {
            let mut rng = stream_rng(17, 42);
            let sigma = wind_error_std(p, kappa).unwrap();
            let draws: Vec<f64> = (0..n)
                .map(|_| sample_wind_realization(p, kappa, &mut rng).unwrap() - p)
                .collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let std =
                (draws.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n as f64).sqrt();
            assert!(
                (std - sigma).abs() < 0.05 * sigma,
                "p={p} kappa={kappa}: std {std} vs sigma {sigma}"
            );
            let se = sigma / (n as f64).sqrt();
            assert!(mean.abs() < 3.0 * se, "p={p}: mean {mean} vs 3se {}", 3.0 * se);
        }
    }

    #[test]
    fn beta_sampled_mean_is_forecast() {
        let p = 0.5;
        let sigma = wind_error_std(p, 1.0).unwrap();
        let (a, b) = beta_shape(p, sigma).unwrap();
        let mut rng = stream_rng(23, 0);
        let beta = Beta::new(a, b).unwrap();
        let n = 100_000;
        let mean = (0..n).map(|_| beta.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = sigma / (n as f64).sqrt();
        assert!((mean - p).abs() < 3.0 * se);
    }
}
