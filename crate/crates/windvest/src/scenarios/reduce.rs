//! Scenario reduction by transport-cost-optimal subset selection.
//!
//! The retained-set quality measure is the probability-weighted sum of
//! Euclidean distances from every scenario to its nearest retained
//! scenario (the transport cost of moving each dropped scenario's mass to
//! its closest survivor). Small instances are solved exactly by subset
//! enumeration; larger ones use greedy fast-forward selection, which picks
//! one scenario at a time to minimize that same measure. Dropped
//! probability mass is reassigned to the nearest retained scenario.

use super::ScenarioError;

/// Result of a reduction: indices into the original scenario list plus the
/// redistributed probabilities, aligned with `selected`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub selected: Vec<usize>,
    pub probabilities: Vec<f64>,
}

/// Exact enumeration is used while C(n, k) stays below this.
const EXACT_SUBSET_CAP: u128 = 20_000;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > EXACT_SUBSET_CAP {
            return acc;
        }
    }
    acc
}

fn transport_cost(dist: &[Vec<f64>], probs: &[f64], selected: &[usize]) -> f64 {
    dist.iter()
        .zip(probs)
        .map(|(row, &p)| {
            let d = selected
                .iter()
                .map(|&j| row[j])
                .fold(f64::INFINITY, f64::min);
            p * d
        })
        .sum()
}

/// Reduces `scenarios` (one value vector each, with probabilities `probs`)
/// to `target` scenarios. Output probabilities sum to the input total; the
/// retained values are a subset of the input values.
pub fn reduce_scenarios(
    scenarios: &[Vec<f64>],
    probs: &[f64],
    target: usize,
) -> Result<Reduction, ScenarioError> {
    let n = scenarios.len();
    if target == 0 || target > n || probs.len() != n {
        return Err(ScenarioError::BadTargetCount {
            target,
            available: n,
        });
    }
    let dim = scenarios[0].len();
    if let Some(s) = scenarios.iter().find(|s| s.len() != dim) {
        return Err(ScenarioError::MixedDimensions(dim, s.len()));
    }
    if target == n {
        return Ok(Reduction {
            selected: (0..n).collect(),
            probabilities: probs.to_vec(),
        });
    }

    let dist: Vec<Vec<f64>> = scenarios
        .iter()
        .map(|a| scenarios.iter().map(|b| distance(a, b)).collect())
        .collect();

    let selected = if binomial(n, target) <= EXACT_SUBSET_CAP {
        exact_select(&dist, probs, target)
    } else {
        fast_forward_select(&dist, probs, target)
    };

    // move each dropped scenario's probability to its nearest survivor
    let mut probabilities: Vec<f64> = selected.iter().map(|&j| probs[j]).collect();
    for i in 0..n {
        if selected.contains(&i) {
            continue;
        }
        let nearest = (0..selected.len())
            .min_by(|&a, &b| {
                dist[i][selected[a]]
                    .partial_cmp(&dist[i][selected[b]])
                    .unwrap()
            })
            .unwrap();
        probabilities[nearest] += probs[i];
    }
    Ok(Reduction {
        selected,
        probabilities,
    })
}

fn exact_select(dist: &[Vec<f64>], probs: &[f64], target: usize) -> Vec<usize> {
    let n = dist.len();
    let mut subset: Vec<usize> = (0..target).collect();
    let mut best = subset.clone();
    let mut best_cost = transport_cost(dist, probs, &subset);
    loop {
        // advance to the next k-combination in lexicographic order
        let mut i = target;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] != i + n - target {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..target {
            subset[j] = subset[j - 1] + 1;
        }
        let cost = transport_cost(dist, probs, &subset);
        if cost < best_cost - 1e-15 {
            best_cost = cost;
            best = subset.clone();
        }
    }
}

fn fast_forward_select(dist: &[Vec<f64>], probs: &[f64], target: usize) -> Vec<usize> {
    let n = dist.len();
    let mut selected = Vec::with_capacity(target);
    let mut in_set = vec![false; n];
    // distance of each scenario to the current retained set
    let mut dmin = vec![f64::INFINITY; n];
    for _ in 0..target {
        let mut best = usize::MAX;
        let mut best_cost = f64::INFINITY;
        for u in 0..n {
            if in_set[u] {
                continue;
            }
            let cost: f64 = (0..n)
                .map(|i| probs[i] * dmin[i].min(dist[i][u]))
                .sum();
            if cost < best_cost - 1e-15 {
                best_cost = cost;
                best = u;
            }
        }
        selected.push(best);
        in_set[best] = true;
        for i in 0..n {
            dmin[i] = dmin[i].min(dist[i][best]);
        }
    }
    selected.sort_unstable();
    selected
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equal_probs(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn identity_when_target_is_count() {
        let s = vec![vec![1.0], vec![2.0], vec![3.0]];
        let r = reduce_scenarios(&s, &equal_probs(3), 3).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
        assert_eq!(r.probabilities, equal_probs(3));
    }

    #[test]
    fn duplicates_collapse_to_full_mass() {
        let s = vec![vec![0.4, 0.6]; 3];
        let r = reduce_scenarios(&s, &equal_probs(3), 1).unwrap();
        assert_eq!(r.selected.len(), 1);
        assert!((r.probabilities[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_instance_matches_exhaustive() {
        // {0,1,2,3,10} equiprobable, keep 2: optimum cost is 4/5.
        let s: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0, 10.0]
            .iter()
            .map(|&x| vec![x])
            .collect();
        let probs = equal_probs(5);
        let r = reduce_scenarios(&s, &probs, 2).unwrap();
        let cost = transport_cost(
            &s.iter()
                .map(|a| s.iter().map(|b| distance(a, b)).collect())
                .collect::<Vec<_>>(),
            &probs,
            &r.selected,
        );
        assert!((cost - 0.8).abs() < 1e-12, "cost {cost}");
        assert!(r.selected.contains(&4), "the outlier 10 must survive");
        assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probability_conserved_and_subset() {
        let s: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()])
            .collect();
        let probs: Vec<f64> = (0..40).map(|i| (i + 1) as f64).collect();
        let total: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let r = reduce_scenarios(&s, &probs, 7).unwrap();
        assert_eq!(r.selected.len(), 7);
        assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for &i in &r.selected {
            assert!(i < 40);
        }
    }

    #[test]
    fn bad_target_rejected() {
        let s = vec![vec![0.0]];
        assert!(matches!(
            reduce_scenarios(&s, &[1.0], 0),
            Err(ScenarioError::BadTargetCount { .. })
        ));
        assert!(matches!(
            reduce_scenarios(&s, &[1.0], 2),
            Err(ScenarioError::BadTargetCount { .. })
        ));
    }
}
