//! DC network model: nodes, lines, incidence/susceptance structure and
//! flow computation.
//!
//! Susceptances are stored in per unit on the network's own `base_power`;
//! everything that crosses the module boundary (flows, injections, line
//! capacities) is in MW. Angles are in radians with the reference node
//! pinned to zero.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("line {index}: unknown node `{node}`")]
    UnknownNode { index: usize, node: String },
    #[error("line {index}: endpoints must differ (both `{node}`)")]
    SelfLoop { index: usize, node: String },
    #[error("line {index}: {quantity} must be positive, got {value}")]
    NonPositive {
        index: usize,
        quantity: &'static str,
        value: f64,
    },
    #[error("base power must be positive, got {0}")]
    BadBasePower(f64),
    #[error("reference node `{0}` is not in the node list")]
    BadReference(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("network is not connected: node `{0}` is unreachable from the reference")]
    Disconnected(String),
    #[error("expected {expected} angles, got {got}")]
    AngleDimension { expected: usize, got: usize },
}

/// A transmission line. Parallel lines between the same node pair are kept
/// as distinct entries.
#[derive(Debug, Clone)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    /// Susceptance in p.u. on the network base.
    pub susceptance: f64,
    /// Thermal capacity in MW, applied symmetrically in both directions.
    pub capacity: f64,
}

/// Immutable DC network. Safe to share across scenario workers.
#[derive(Debug, Clone)]
pub struct Network {
    node_ids: Vec<String>,
    lines: Vec<Line>,
    base_power: f64,
    reference: usize,
}

/// Raw line description with node names, as read from the line CSV.
#[derive(Debug, Clone)]
pub struct LineSpec {
    pub from: String,
    pub to: String,
    pub susceptance_pu: f64,
    pub capacity_mw: f64,
}

/// Flows and nodal net injections implied by an angle vector, in MW.
#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Per line: `base_power * susceptance * (angle_from - angle_to)`.
    pub flow_mw: Vec<f64>,
    /// Per node: power the node pushes into the network (rows of AᵀBAδ, scaled).
    pub injection_mw: Vec<f64>,
}

impl Network {
    pub fn new(
        node_ids: Vec<String>,
        line_specs: &[LineSpec],
        base_power: f64,
        reference_node: &str,
    ) -> Result<Self, GridError> {
        if base_power <= 0.0 || !base_power.is_finite() {
            return Err(GridError::BadBasePower(base_power));
        }
        for (i, id) in node_ids.iter().enumerate() {
            if node_ids[..i].contains(id) {
                return Err(GridError::DuplicateNode(id.clone()));
            }
        }
        let index_of = |name: &str| node_ids.iter().position(|n| n == name);
        let reference = index_of(reference_node)
            .ok_or_else(|| GridError::BadReference(reference_node.to_string()))?;

        let mut lines = Vec::with_capacity(line_specs.len());
        for (index, spec) in line_specs.iter().enumerate() {
            let from = index_of(&spec.from).ok_or_else(|| GridError::UnknownNode {
                index,
                node: spec.from.clone(),
            })?;
            let to = index_of(&spec.to).ok_or_else(|| GridError::UnknownNode {
                index,
                node: spec.to.clone(),
            })?;
            if from == to {
                return Err(GridError::SelfLoop {
                    index,
                    node: spec.from.clone(),
                });
            }
            if !(spec.susceptance_pu > 0.0) {
                return Err(GridError::NonPositive {
                    index,
                    quantity: "susceptance",
                    value: spec.susceptance_pu,
                });
            }
            if !(spec.capacity_mw > 0.0) {
                return Err(GridError::NonPositive {
                    index,
                    quantity: "capacity",
                    value: spec.capacity_mw,
                });
            }
            lines.push(Line {
                from,
                to,
                susceptance: spec.susceptance_pu,
                capacity: spec.capacity_mw,
            });
        }

        let net = Network {
            node_ids,
            lines,
            base_power,
            reference,
        };
        net.check_connected()?;
        Ok(net)
    }

    /// A nodal-price model needs every node coupled to the reference for the
    /// angle pinning to fix the flow solution.
    fn check_connected(&self) -> Result<(), GridError> {
        let n = self.node_ids.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.reference];
        seen[self.reference] = true;
        while let Some(b) = stack.pop() {
            for line in &self.lines {
                for (x, y) in [(line.from, line.to), (line.to, line.from)] {
                    if x == b && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(b) => Err(GridError::Disconnected(self.node_ids[b].clone())),
            None => Ok(()),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.node_ids.iter().position(|n| n == name)
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn base_power(&self) -> f64 {
        self.base_power
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    /// Line-to-node incidence matrix A (n_L x n_B): +1 at the from column,
    /// -1 at the to column of each row.
    pub fn incidence_matrix(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.node_ids.len()]; self.lines.len()];
        for (l, line) in self.lines.iter().enumerate() {
            a[l][line.from] = 1.0;
            a[l][line.to] = -1.0;
        }
        a
    }

    /// MW flow on each line for a given angle vector: base * B * A * delta.
    pub fn dc_flows(&self, angles: &[f64]) -> Result<FlowResult, GridError> {
        if angles.len() != self.node_ids.len() {
            return Err(GridError::AngleDimension {
                expected: self.node_ids.len(),
                got: angles.len(),
            });
        }
        let mut flow_mw = Vec::with_capacity(self.lines.len());
        let mut injection_mw = vec![0.0; self.node_ids.len()];
        for line in &self.lines {
            let f = self.base_power * line.susceptance * (angles[line.from] - angles[line.to]);
            flow_mw.push(f);
            injection_mw[line.from] += f;
            injection_mw[line.to] -= f;
        }
        Ok(FlowResult {
            flow_mw,
            injection_mw,
        })
    }
}
