//! Market data: generators with day-ahead and balancing offers, nodal load
//! shares, candidate investment projects and placement decisions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Network;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("generator `{0}` references unknown node `{1}`")]
    UnknownGeneratorNode(String, String),
    #[error("load share references unknown node `{0}`")]
    UnknownLoadNode(String),
    #[error("load shares sum to {0}, expected 1")]
    SharesNotNormalized(f64),
    #[error("generator `{id}`: {what} must be nonnegative, got {value}")]
    NegativeQuantity {
        id: String,
        what: &'static str,
        value: f64,
    },
    #[error("voll {voll} must exceed the highest generator cost {max_cost}")]
    VollTooLow { voll: f64, max_cost: f64 },
    #[error("project `{0}`: candidate node `{1}` is unknown")]
    UnknownCandidate(String, String),
    #[error("existing wind at unknown node `{0}`")]
    UnknownWindNode(String),
    #[error("project count mismatch: U has {0} rows, {1} projects defined")]
    PlacementShape(usize, usize),
    #[error("project `{0}` placed at more than one node")]
    MultiplePlacements(String),
}

/// A dispatchable generating unit with its day-ahead offer and its up/down
/// balancing offers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub node: String,
    pub p_max: f64,
    /// Day-ahead offer price ($/MWh), equal to marginal cost.
    pub cost: f64,
    /// Maximum up-regulation (MW) and its price ($/MWh).
    pub up_cap: f64,
    pub up_price: f64,
    /// Maximum down-regulation (MW) and its price ($/MWh). The system is
    /// refunded `down_price` per MWh bought back, so a negative value means
    /// down-regulating this unit costs the system money.
    pub down_cap: f64,
    pub down_price: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadShare {
    pub node: String,
    pub share: f64,
}

/// Existing (non-candidate) wind capacity, treated as a zero-cost must-run
/// stochastic injection owned by other agents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistingWind {
    pub node: String,
    pub capacity_mw: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarketData {
    pub generators: Vec<Generator>,
    pub loads: Vec<LoadShare>,
    pub peak_load_mw: f64,
    /// Value of lost load, $/MWh: the price of involuntary shedding and of
    /// last-resort surplus disposal.
    pub voll: f64,
    pub existing_wind: Vec<ExistingWind>,
}

impl MarketData {
    pub fn validate(&self, network: &Network) -> Result<(), MarketError> {
        let mut max_cost = f64::NEG_INFINITY;
        for g in &self.generators {
            if network.node_index(&g.node).is_none() {
                return Err(MarketError::UnknownGeneratorNode(
                    g.id.clone(),
                    g.node.clone(),
                ));
            }
            for (what, value) in [
                ("p_max", g.p_max),
                ("up_cap", g.up_cap),
                ("down_cap", g.down_cap),
            ] {
                if value < 0.0 {
                    return Err(MarketError::NegativeQuantity {
                        id: g.id.clone(),
                        what,
                        value,
                    });
                }
            }
            max_cost = max_cost.max(g.cost).max(g.up_price);
        }
        let share_sum: f64 = self.loads.iter().map(|l| l.share).sum();
        if (share_sum - 1.0).abs() > 1e-9 {
            return Err(MarketError::SharesNotNormalized(share_sum));
        }
        for l in &self.loads {
            if network.node_index(&l.node).is_none() {
                return Err(MarketError::UnknownLoadNode(l.node.clone()));
            }
        }
        for w in &self.existing_wind {
            if network.node_index(&w.node).is_none() {
                return Err(MarketError::UnknownWindNode(w.node.clone()));
            }
        }
        if self.voll <= max_cost {
            return Err(MarketError::VollTooLow {
                voll: self.voll,
                max_cost,
            });
        }
        Ok(())
    }

    /// Demand at each node index for a total system load of `load_pu` of peak.
    pub fn nodal_demand(&self, network: &Network, load_pu: f64) -> Vec<f64> {
        let mut d = vec![0.0; network.n_nodes()];
        for l in &self.loads {
            if let Some(b) = network.node_index(&l.node) {
                d[b] += l.share * load_pu * self.peak_load_mw;
            }
        }
        d
    }

    /// Existing wind capacity per node index.
    pub fn existing_wind_by_node(&self, network: &Network) -> Vec<f64> {
        let mut w = vec![0.0; network.n_nodes()];
        for e in &self.existing_wind {
            if let Some(b) = network.node_index(&e.node) {
                w[b] += e.capacity_mw;
            }
        }
        w
    }
}

/// A candidate wind-farm project: a capacity block that may be placed at
/// one of its candidate nodes or not built at all.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Project {
    pub name: String,
    pub capacity_mw: f64,
    /// Annualized investment cost, $/yr.
    pub annual_cost: f64,
    pub candidate_nodes: Vec<String>,
}

impl Project {
    /// Annualized cost of `capacity_mw` at `cost_per_kw` $/kW over
    /// `lifetime_yr` years: capacity * $/kW * 1000 / lifetime.
    pub fn annualize(capacity_mw: f64, cost_per_kw: f64, lifetime_yr: f64) -> f64 {
        capacity_mw * cost_per_kw * 1000.0 / lifetime_yr
    }
}

/// Binary placement: `placement[w]` is the node index where project `w`
/// is built, or `None` if it is not built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstalledCapacity {
    pub placement: Vec<Option<usize>>,
}

impl InstalledCapacity {
    pub fn none(n_projects: usize) -> Self {
        InstalledCapacity {
            placement: vec![None; n_projects],
        }
    }

    /// New wind capacity per node index implied by the placement.
    pub fn capacity_by_node(&self, projects: &[Project], n_nodes: usize) -> Vec<f64> {
        let mut cap = vec![0.0; n_nodes];
        for (w, slot) in self.placement.iter().enumerate() {
            if let Some(b) = slot {
                cap[*b] += projects[w].capacity_mw;
            }
        }
        cap
    }

    pub fn total_capacity(&self, projects: &[Project]) -> f64 {
        self.placement
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(w, _)| projects[w].capacity_mw)
            .sum()
    }

    pub fn total_investment(&self, projects: &[Project]) -> f64 {
        self.placement
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(w, _)| projects[w].annual_cost)
            .sum()
    }
}

/// Per-scenario day-ahead clearing outcome in physical units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClearingOutcome {
    /// Dispatch per generator, MW.
    pub gen_mw: Vec<f64>,
    /// Day-ahead wind dispatch per node (new projects), MW.
    pub new_wind_mw: Vec<f64>,
    /// Day-ahead wind dispatch per node (existing farms), MW.
    pub existing_wind_mw: Vec<f64>,
    pub shed_mw: Vec<f64>,
    pub surplus_mw: Vec<f64>,
    pub angles: Vec<f64>,
    /// Nodal prices, $/MWh.
    pub prices: Vec<f64>,
    /// Hourly day-ahead system cost, $.
    pub cost: f64,
}

/// Per-balancing-scenario outcome. Prices are probability-removed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalancingOutcome {
    pub up_mw: Vec<f64>,
    pub down_mw: Vec<f64>,
    /// Wind adjustment of the new projects per node, MW (signed).
    pub new_wind_adjust_mw: Vec<f64>,
    pub existing_wind_adjust_mw: Vec<f64>,
    pub shed_mw: Vec<f64>,
    pub surplus_mw: Vec<f64>,
    pub angle_changes: Vec<f64>,
    /// Balancing prices per node, $/MWh (dual divided by the scenario
    /// probability).
    pub prices: Vec<f64>,
    /// Hourly balancing cost contribution of this scenario, $ (already
    /// probability-weighted in expectation terms when summed by callers
    /// using the scenario probability).
    pub cost: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{LineSpec, Network};

    fn net() -> Network {
        Network::new(
            vec!["n1".into(), "n2".into()],
            &[LineSpec {
                from: "n1".into(),
                to: "n2".into(),
                susceptance_pu: 68.5,
                capacity_mw: 200.0,
            }],
            100.0,
            "n1",
        )
        .unwrap()
    }

    fn gen(id: &str, node: &str, p_max: f64, cost: f64) -> Generator {
        Generator {
            id: id.into(),
            node: node.into(),
            p_max,
            cost,
            up_cap: 0.0,
            up_price: 0.0,
            down_cap: 0.0,
            down_price: 0.0,
        }
    }

    #[test]
    fn validation_and_nodal_demand() {
        let market = MarketData {
            generators: vec![gen("g1", "n1", 400.0, 20.0)],
            loads: vec![
                LoadShare {
                    node: "n1".into(),
                    share: 1.0 / 11.0,
                },
                LoadShare {
                    node: "n2".into(),
                    share: 10.0 / 11.0,
                },
            ],
            peak_load_mw: 660.0,
            voll: 1000.0,
            existing_wind: vec![],
        };
        let network = net();
        market.validate(&network).unwrap();
        let d = market.nodal_demand(&network, 1.0);
        assert!((d[0] - 60.0).abs() < 1e-9);
        assert!((d[1] - 600.0).abs() < 1e-9);

        let mut bad = market.clone();
        bad.voll = 10.0;
        assert!(matches!(
            bad.validate(&network),
            Err(MarketError::VollTooLow { .. })
        ));
        let mut bad = market.clone();
        bad.loads[0].share = 0.5;
        assert!(matches!(
            bad.validate(&network),
            Err(MarketError::SharesNotNormalized(_))
        ));
    }

    #[test]
    fn annualized_investment_cost() {
        // 200 MW at $800/kW over 40 years -> $4e6 per year
        assert!((Project::annualize(200.0, 800.0, 40.0) - 4.0e6).abs() < 1e-6);
    }

    #[test]
    fn capacity_by_node() {
        let projects = vec![
            Project {
                name: "w1".into(),
                capacity_mw: 200.0,
                annual_cost: 4e6,
                candidate_nodes: vec!["n1".into(), "n2".into()],
            },
            Project {
                name: "w2".into(),
                capacity_mw: 50.0,
                annual_cost: 1e6,
                candidate_nodes: vec!["n2".into()],
            },
        ];
        let u = InstalledCapacity {
            placement: vec![Some(1), Some(1)],
        };
        assert_eq!(u.capacity_by_node(&projects, 2), vec![0.0, 250.0]);
        assert_eq!(u.total_capacity(&projects), 250.0);
        assert_eq!(u.total_investment(&projects), 5e6);
        assert_eq!(
            InstalledCapacity::none(2).capacity_by_node(&projects, 2),
            vec![0.0, 0.0]
        );
    }
}
