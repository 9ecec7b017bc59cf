//! Instances built from graph descriptions.
//!
//! Two encodings are supported. In shortest-path mode every node keeps its
//! content (`A = E = I`) and each directed edge is an input moving content
//! from origin to destination. In flow mode nodes retain, diffuse and
//! dissipate heat through `A`, pipes lose a fraction of what they carry, and
//! a node can only forward what it retains (`Eᵢᵢ = Aᵢᵢ`).

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bellman::{value_iterate, SolveOptions, Status};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::model::{validate, ProblemData};
use crate::policy::{Choice, Policy};

pub type NodeId = u64;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: NodeId,
    pub state_cost: f64,
    /// Fraction of the content kept in place per step.
    #[serde(default = "one")]
    pub retention: f64,
    /// `(target, rate)`: fraction of the content passively moving to `target`.
    #[serde(default)]
    pub diffusion: Vec<(NodeId, f64)>,
}

impl NodeSpec {
    pub fn new(id: NodeId, state_cost: f64) -> Self {
        Self { id, state_cost, retention: 1.0, diffusion: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub origin: NodeId,
    pub dest: NodeId,
    pub transport_cost: f64,
    /// Fraction of the moved content that arrives.
    #[serde(default = "one")]
    pub efficiency: f64,
}

impl EdgeSpec {
    pub fn new(origin: NodeId, dest: NodeId, transport_cost: f64) -> Self {
        Self { origin, dest, transport_cost, efficiency: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub target: Option<NodeId>,
}

const CONSERVATION_SLACK: f64 = 1e-12;

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// State index of every node id.
    pub fn index_map(&self) -> Result<HashMap<NodeId, usize>> {
        let mut map = HashMap::with_capacity(self.nodes.len());
        for (k, node) in self.nodes.iter().enumerate() {
            if map.insert(node.id, k).is_some() {
                return Err(Error::Graph(format!("duplicate node id {}", node.id)));
            }
        }
        Ok(map)
    }

    pub fn index_of(&self, id: NodeId) -> Result<usize> {
        self.nodes.iter().position(|n| n.id == id).ok_or_else(|| Error::Graph(format!("unknown node {id}")))
    }

    /// Structural checks shared by both builders.
    pub fn check(&self) -> Result<HashMap<NodeId, usize>> {
        if self.nodes.is_empty() {
            return Err(Error::Graph("graph has no nodes".into()));
        }
        let index = self.index_map()?;
        for node in &self.nodes {
            if !(node.state_cost >= 0.0 && node.state_cost.is_finite()) {
                return Err(Error::Graph(format!(
                    "node {}: state cost {} must be nonnegative",
                    node.id, node.state_cost
                )));
            }
            if !(0.0..=1.0).contains(&node.retention) {
                return Err(Error::Graph(format!("node {}: retention {} outside [0, 1]", node.id, node.retention)));
            }
            let mut outflow = node.retention;
            for &(to, rate) in &node.diffusion {
                if !index.contains_key(&to) || to == node.id {
                    return Err(Error::Graph(format!("node {}: bad diffusion target {to}", node.id)));
                }
                if !(rate >= 0.0 && rate.is_finite()) {
                    return Err(Error::Graph(format!("node {}: diffusion rate {rate} must be nonnegative", node.id)));
                }
                outflow += rate;
            }
            if outflow > 1.0 + CONSERVATION_SLACK {
                return Err(Error::Graph(format!(
                    "node {}: retention plus diffusion is {outflow}, exceeding 1",
                    node.id
                )));
            }
        }
        for e in &self.edges {
            if !index.contains_key(&e.origin) || !index.contains_key(&e.dest) {
                return Err(Error::Graph(format!("edge {} -> {} references an unknown node", e.origin, e.dest)));
            }
            if e.origin == e.dest {
                return Err(Error::Graph(format!("self loop at node {}", e.origin)));
            }
            if !(e.transport_cost >= 0.0 && e.transport_cost.is_finite()) {
                return Err(Error::Graph(format!("edge {} -> {}: negative transport cost", e.origin, e.dest)));
            }
            if !(e.efficiency > 0.0 && e.efficiency <= 1.0) {
                return Err(Error::Graph(format!(
                    "edge {} -> {}: efficiency {} outside (0, 1]",
                    e.origin, e.dest, e.efficiency
                )));
            }
        }
        if let Some(t) = self.target {
            if !index.contains_key(&t) {
                return Err(Error::Graph(format!("target {t} is not a node")));
            }
        }
        Ok(index)
    }

    /// Edge indices grouped by origin state index, input order kept inside a group.
    fn edges_by_origin(&self, index: &HashMap<NodeId, usize>) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.nodes.len()];
        for (k, e) in self.edges.iter().enumerate() {
            groups[index[&e.origin]].push(k);
        }
        groups
    }

    /// Every directed edge has a reverse twin with equal cost and efficiency.
    pub fn check_pipe_pairs(&self) -> Result<()> {
        let mut seen: BTreeMap<(NodeId, NodeId), Vec<(f64, f64)>> = BTreeMap::new();
        for e in &self.edges {
            seen.entry((e.origin, e.dest)).or_default().push((e.transport_cost, e.efficiency));
        }
        for ((a, b), params) in &seen {
            let reverse = seen.get(&(*b, *a));
            let matched = reverse.is_some_and(|r| params.iter().all(|p| r.contains(p)));
            if !matched {
                return Err(Error::Graph(format!("pipe {a} -> {b} has no matching reverse edge")));
            }
        }
        Ok(())
    }

    fn assemble(&self, index: &HashMap<NodeId, usize>, a: SparseMatrix, e: SparseMatrix) -> ProblemData {
        let n = self.nodes.len();
        let mut b_blocks = Vec::with_capacity(n);
        let mut r_blocks = Vec::with_capacity(n);
        for group in self.edges_by_origin(index) {
            let mut triplets = Vec::with_capacity(2 * group.len());
            let mut costs = Vec::with_capacity(group.len());
            for (col, &k) in group.iter().enumerate() {
                let edge = &self.edges[k];
                triplets.push((index[&edge.origin], col, -1.0));
                triplets.push((index[&edge.dest], col, edge.efficiency));
                costs.push(edge.transport_cost);
            }
            b_blocks.push(SparseMatrix::from_triplets(n, group.len(), triplets).expect("edge endpoints in range"));
            r_blocks.push(costs);
        }
        let s = self.nodes.iter().map(|n| n.state_cost).collect();
        ProblemData::new(n, n, a, b_blocks, e, s, r_blocks)
    }
}

/// Shortest path to `target` as a control problem with `A = E = I` and `B`
/// the node-link incidence matrix, partition `i` holding the edges leaving
/// node `i`.
pub fn build_shortest_path(g: &GraphSpec) -> Result<ProblemData> {
    let index = g.check()?;
    let target = g.target.ok_or_else(|| Error::Graph("shortest-path mode needs a target node".into()))?;
    for node in &g.nodes {
        if node.retention != 1.0 || !node.diffusion.is_empty() {
            return Err(Error::Graph(format!(
                "node {}: shortest-path mode needs retention 1 and no diffusion",
                node.id
            )));
        }
        if node.id == target && node.state_cost != 0.0 {
            return Err(Error::Graph(format!("target {target} must have zero state cost")));
        }
        if node.id != target && !(node.state_cost > 0.0) {
            return Err(Error::Graph(format!(
                "node {} has zero state cost; waiting there would be free and the value would not be a path length",
                node.id
            )));
        }
    }
    if let Some(e) = g.edges.iter().find(|e| e.efficiency != 1.0) {
        return Err(Error::Graph(format!("edge {} -> {}: shortest-path mode needs efficiency 1", e.origin, e.dest)));
    }
    let n = g.nodes.len();
    Ok(g.assemble(&index, SparseMatrix::identity(n), SparseMatrix::identity(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowOptions {
    /// Require each pipe as two directed edges with equal parameters.
    pub require_pipe_pairs: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { require_pipe_pairs: true }
    }
}

pub fn build_flow_network(g: &GraphSpec) -> Result<ProblemData> {
    build_flow_network_with(g, &FlowOptions::default())
}

/// Heat-flow instance: `Aᵢᵢ` is the retention of node `i`, `Aⱼᵢ` the rate
/// node `i` diffuses into `j`, `E = diag(A)`, and an edge column carries `-1`
/// at its origin and the efficiency at its destination.
pub fn build_flow_network_with(g: &GraphSpec, opts: &FlowOptions) -> Result<ProblemData> {
    let index = g.check()?;
    if opts.require_pipe_pairs {
        g.check_pipe_pairs()?;
    }
    let n = g.nodes.len();
    let mut a_triplets = Vec::new();
    for (i, node) in g.nodes.iter().enumerate() {
        a_triplets.push((i, i, node.retention));
        for &(to, rate) in &node.diffusion {
            a_triplets.push((index[&to], i, rate));
        }
    }
    let a = SparseMatrix::from_triplets(n, n, a_triplets)?;
    let e = SparseMatrix::from_diagonal(&g.nodes.iter().map(|n| n.retention).collect::<Vec<_>>());
    let prob = g.assemble(&index, a, e);
    let report = validate(&prob);
    if !report.is_clean() {
        return Err(Error::InvalidInstance(Box::new(report)));
    }
    Ok(prob)
}

/// Path cost to the target by label correction on the reversed graph, with
/// edge weight `transport_cost + state_cost(origin)`. Unreachable nodes get
/// `+∞`.
pub fn shortest_path_oracle(g: &GraphSpec) -> Result<Vec<f64>> {
    let index = g.check()?;
    let target = g.target.ok_or_else(|| Error::Graph("oracle needs a target node".into()))?;
    let n = g.nodes.len();
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &g.edges {
        let (o, d) = (index[&e.origin], index[&e.dest]);
        incoming[d].push((o, e.transport_cost + g.nodes[o].state_cost));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut queued = vec![false; n];
    let t = index[&target];
    dist[t] = 0.0;
    let mut queue = VecDeque::from([t]);
    queued[t] = true;
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        for &(u, w) in &incoming[v] {
            let candidate = dist[v] + w;
            if candidate < dist[u] {
                dist[u] = candidate;
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    Ok(dist)
}

/// Follows the selected edge out of each node, starting at `origin`, until
/// a node that takes no action.
pub fn extract_route(g: &GraphSpec, prob: &ProblemData, pol: &Policy, origin: NodeId) -> Result<Vec<NodeId>> {
    let mut current = g.index_of(origin)?;
    let mut visited = vec![false; g.nodes.len()];
    let mut route = vec![origin];
    visited[current] = true;
    loop {
        let choice = pol.choices.get(current).copied().unwrap_or(Choice::NoAction);
        let Choice::Selected(col) = choice else {
            return Ok(route);
        };
        let (rows, vals) = prob.b_block(current).col(col);
        let next =
            rows.iter().zip(vals).find(|&(_, &v)| v > 0.0).map(|(&r, _)| r).ok_or_else(|| {
                Error::Graph(format!("input {col} of node {} has no destination", g.nodes[current].id))
            })?;
        let id = g.nodes[next].id;
        if visited[next] {
            return Err(Error::RouteCycle(id));
        }
        visited[next] = true;
        route.push(id);
        current = next;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingConfig {
    pub num_nodes: usize,
    pub seed: u64,
    pub cost_range: (f64, f64),
    /// Half-open `[lo, hi)`.
    pub efficiency_range: (f64, f64),
    pub max_retries: usize,
}

impl CoolingConfig {
    pub fn new(num_nodes: usize, seed: u64) -> Self {
        Self { num_nodes, seed, cost_range: (0.2, 1.0), efficiency_range: (0.95, 1.0), max_retries: 16 }
    }
}

/// Seeded random cooling network: a random spanning tree plus extra pipes,
/// every pipe a pair of identical directed edges, `⌈n/5⌉` dissipating nodes
/// and passive diffusion along some pipes. Retries with a derived seed
/// until value iteration converges on the flow instance.
pub fn generate_cooling_instance(cfg: &CoolingConfig) -> Result<GraphSpec> {
    if cfg.num_nodes < 2 {
        return Err(Error::InvalidParameter("cooling instance needs at least two nodes".into()));
    }
    let (clo, chi) = cfg.cost_range;
    let (elo, ehi) = cfg.efficiency_range;
    if !(0.0 <= clo && clo <= chi) || !(0.0 < elo && elo < ehi && ehi <= 1.0) {
        return Err(Error::InvalidParameter("bad cost or efficiency range".into()));
    }
    for attempt in 0..=cfg.max_retries {
        let seed = cfg.seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = cooling_candidate(cfg, seed);
        let Ok(prob) = build_flow_network(&g) else { continue };
        let solved = value_iterate(&prob, &SolveOptions::default());
        if matches!(solved, Ok(ref r) if r.status == Status::FixedPoint) {
            return Ok(g);
        }
    }
    Err(Error::RetriesExhausted(cfg.max_retries))
}

fn cooling_candidate(cfg: &CoolingConfig, seed: u64) -> GraphSpec {
    let n = cfg.num_nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };

    let mut pipes: Vec<(usize, usize)> = (1..n).map(|k| (rng.random_range(0..k), k)).collect();
    let extra = n / 3;
    let mut tries = 0;
    while pipes.len() < n - 1 + extra && tries < 10 * n {
        tries += 1;
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !pipes.contains(&(a, b)) {
            pipes.push((a, b));
        }
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(a, b) in &pipes {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }

    let num_dissipating = n.div_ceil(5).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let dissipating = &order[..num_dissipating];

    let nodes = (0..n)
        .map(|i| {
            let id = i as NodeId + 1;
            let state_cost = uniform(&mut rng, cfg.cost_range);
            if dissipating.contains(&i) {
                NodeSpec { id, state_cost, retention: uniform(&mut rng, (0.5, 0.9)), diffusion: Vec::new() }
            } else if rng.random_bool(0.3) {
                let to = neighbors[i][rng.random_range(0..neighbors[i].len())];
                let rate = uniform(&mut rng, (0.02, 0.1));
                NodeSpec { id, state_cost, retention: 1.0 - rate, diffusion: vec![(to as NodeId + 1, rate)] }
            } else {
                NodeSpec::new(id, state_cost)
            }
        })
        .collect();

    let mut edges = Vec::with_capacity(2 * pipes.len());
    for &(a, b) in &pipes {
        let transport_cost = uniform(&mut rng, cfg.cost_range);
        let efficiency = uniform(&mut rng, cfg.efficiency_range);
        for (o, d) in [(a, b), (b, a)] {
            edges.push(EdgeSpec { origin: o as NodeId + 1, dest: d as NodeId + 1, transport_cost, efficiency });
        }
    }
    GraphSpec { nodes, edges, target: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::DivergenceWitness;
    use crate::instances::{example1, example1_graph, EXAMPLE1_P};
    use crate::model::check_assumption_a;
    use crate::policy::extract_policy;

    #[test]
    fn example1_graph_reproduces_incidence_matrix() {
        assert_eq!(build_shortest_path(&example1_graph()).unwrap(), example1());
    }

    #[test]
    fn two_node_path() {
        let g = GraphSpec {
            nodes: vec![NodeSpec::new(1, 1.0), NodeSpec::new(2, 0.0)],
            edges: vec![EdgeSpec::new(1, 2, 0.0)],
            target: Some(2),
        };
        let r = value_iterate(&build_shortest_path(&g).unwrap(), &SolveOptions::default()).unwrap();
        assert_eq!(r.p, vec![1.0, 0.0]);
        assert_eq!(shortest_path_oracle(&g).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn isolated_node_diverges_and_oracle_is_infinite() {
        let g = GraphSpec {
            nodes: vec![NodeSpec::new(1, 1.0), NodeSpec::new(2, 0.0), NodeSpec::new(3, 1.0)],
            edges: vec![EdgeSpec::new(1, 2, 0.0)],
            target: Some(2),
        };
        let r = value_iterate(&build_shortest_path(&g).unwrap(), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Diverged);
        assert_eq!(r.divergence, Some(DivergenceWitness::GrowthRay));
        let d = shortest_path_oracle(&g).unwrap();
        assert_eq!(&d[..2], &[1.0, 0.0]);
        assert!(d[2].is_infinite());
    }

    #[test]
    fn shortest_path_preconditions() {
        let mut g = example1_graph();
        g.target = None;
        assert!(build_shortest_path(&g).is_err());
        let mut g = example1_graph();
        g.nodes[1].state_cost = 0.0;
        assert!(matches!(build_shortest_path(&g), Err(Error::Graph(msg)) if msg.contains("zero state cost")));
        let mut g = example1_graph();
        g.edges[0].efficiency = 0.9;
        assert!(build_shortest_path(&g).is_err());
        let mut g = example1_graph();
        g.edges[0].dest = 9;
        assert!(build_shortest_path(&g).is_err());
    }

    #[test]
    fn oracle_on_example1() {
        assert_eq!(shortest_path_oracle(&example1_graph()).unwrap(), EXAMPLE1_P.to_vec());
    }

    #[test]
    fn routes_in_example1() {
        let (g, prob) = (example1_graph(), example1());
        let pol = extract_policy(&prob, &EXAMPLE1_P).unwrap();
        assert_eq!(extract_route(&g, &prob, &pol, 1).unwrap(), vec![1, 2, 4]);
        assert_eq!(extract_route(&g, &prob, &pol, 3).unwrap(), vec![3, 4]);
        assert_eq!(extract_route(&g, &prob, &pol, 4).unwrap(), vec![4]);
    }

    #[test]
    fn route_cycle_detected() {
        let (g, prob) = (example1_graph(), example1());
        // 1 -> 2 and 2 -> 1.
        let pol = Policy {
            choices: vec![Choice::Selected(0), Choice::Selected(1), Choice::NoAction, Choice::NoAction],
            reduced_costs: vec![],
        };
        assert!(matches!(extract_route(&g, &prob, &pol, 1), Err(Error::RouteCycle(1))));
    }

    #[test]
    fn single_dissipating_node() {
        let g = GraphSpec {
            nodes: vec![NodeSpec { id: 1, state_cost: 1.0, retention: 0.5, diffusion: vec![] }],
            edges: vec![],
            target: None,
        };
        let prob = build_flow_network(&g).unwrap();
        assert_eq!(prob.a().to_dense(), vec![vec![0.5]]);
        assert_eq!(prob.e().to_dense(), vec![vec![0.5]]);
        let r = value_iterate(&prob, &SolveOptions::default()).unwrap();
        assert!((r.p[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn two_node_flow() {
        let g = GraphSpec {
            nodes: vec![
                NodeSpec { id: 1, state_cost: 1.0, retention: 1.0, diffusion: vec![] },
                NodeSpec { id: 2, state_cost: 0.2, retention: 0.5, diffusion: vec![] },
            ],
            edges: vec![EdgeSpec { origin: 1, dest: 2, transport_cost: 0.2, efficiency: 0.95 }],
            target: None,
        };
        assert!(build_flow_network(&g).is_err(), "single direction needs the override");
        let prob = build_flow_network_with(&g, &FlowOptions { require_pipe_pairs: false }).unwrap();
        let r = value_iterate(&prob, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::FixedPoint);
        assert!((r.p[1] - 0.4).abs() < 1e-8);
        assert!((r.p[0] - 1.58).abs() < 1e-8);
    }

    #[test]
    fn flow_rejects_bad_specs() {
        let mut g = GraphSpec {
            nodes: vec![
                NodeSpec { id: 1, state_cost: 1.0, retention: 0.9, diffusion: vec![(2, 0.2)] },
                NodeSpec::new(2, 1.0),
            ],
            edges: vec![],
            target: None,
        };
        assert!(matches!(build_flow_network(&g), Err(Error::Graph(msg)) if msg.contains("exceeding 1")));
        g.nodes[0].diffusion.clear();
        g.edges = vec![EdgeSpec { origin: 1, dest: 2, transport_cost: 0.5, efficiency: 1.2 }];
        assert!(build_flow_network(&g).is_err());
    }

    #[test]
    fn flow_diffusion_layout() {
        let g = GraphSpec {
            nodes: vec![
                NodeSpec { id: 10, state_cost: 1.0, retention: 0.9, diffusion: vec![(20, 0.1)] },
                NodeSpec { id: 20, state_cost: 1.0, retention: 0.5, diffusion: vec![] },
            ],
            edges: vec![],
            target: None,
        };
        let prob = build_flow_network(&g).unwrap();
        assert_eq!(prob.a().get(1, 0), 0.1);
        assert_eq!(prob.a().get(0, 1), 0.0);
        assert!(check_assumption_a(&prob, &Default::default()).is_empty());
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let a = generate_cooling_instance(&CoolingConfig::new(26, 1)).unwrap();
        let b = generate_cooling_instance(&CoolingConfig::new(26, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.nodes.len(), 26);
        let dissipating =
            a.nodes.iter().filter(|n| n.retention + n.diffusion.iter().map(|d| d.1).sum::<f64>() < 1.0 - 1e-12).count();
        assert!(dissipating >= 6);
        assert!(a.check_pipe_pairs().is_ok());
        let prob = build_flow_network(&a).unwrap();
        assert!(validate(&prob).is_clean());
        assert_ne!(a, generate_cooling_instance(&CoolingConfig::new(26, 2)).unwrap());
    }

    #[test]
    fn minimal_generated_instance() {
        let g = generate_cooling_instance(&CoolingConfig::new(2, 5)).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 2);
        assert!(generate_cooling_instance(&CoolingConfig::new(1, 5)).is_err());
    }

    #[test]
    fn graph_json_defaults() {
        let g = GraphSpec::from_json(r#"{"nodes": [{"id": 1, "state_cost": 1}], "edges": []}"#).unwrap();
        assert_eq!(g.nodes[0].retention, 1.0);
        assert_eq!(g.target, None);
        assert!(GraphSpec::from_json(r#"{"nodes": [{"id": 1}], "edges": []}"#).is_err());
        assert_eq!(GraphSpec::from_json(&example1_graph().to_json()).unwrap(), example1_graph());
    }
}
