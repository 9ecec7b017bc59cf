//! Seeded random instances for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SparseMatrix;
use crate::model::ProblemData;
use crate::network::{EdgeSpec, GraphSpec, NodeSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomConfig {
    pub n: usize,
    /// Number of partitions, at most `n`.
    pub num_partitions: usize,
    /// Inputs per partition are drawn from `0..=max_width`.
    pub max_width: usize,
    /// Off-diagonal entries per column of `A`.
    pub off_diagonal: usize,
    /// Receiving rows per input column.
    pub fan_out: usize,
    /// Probability that a state cost is zero.
    pub zero_cost_prob: f64,
    pub seed: u64,
}

impl RandomConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, num_partitions: n, max_width: 3, off_diagonal: 2, fan_out: 2, zero_cost_prob: 0.0, seed }
    }
}

/// An instance satisfying both assumptions whose value is finite: every
/// column of `A` sums to less than one, so `p* ≤ (I − Aᵀ)⁻¹ s`.
///
/// Block `i` moves content out of state `i` (a negative entry of magnitude
/// `βᵢ ≤ 1` on row `i`) into up to `fan_out` other states. Row `i` of `E`
/// is a fraction of row `i` of `A` scaled by `1/βᵢ`.
pub fn random_instance(cfg: &RandomConfig) -> ProblemData {
    let n = cfg.n;
    let m = cfg.num_partitions.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut a_trip = Vec::new();
    for col in 0..n {
        let diag = rng.random_range(0.3..0.9);
        a_trip.push((col, col, diag));
        let mut budget = 0.95 - diag;
        for _ in 0..cfg.off_diagonal.min(n.saturating_sub(1)) {
            let row = rng.random_range(0..n);
            if row == col {
                continue;
            }
            let v = rng.random_range(0.0..budget * 0.5);
            budget -= v;
            a_trip.push((row, col, v));
        }
    }
    let a = SparseMatrix::from_triplets(n, n, a_trip).expect("indices in range");

    let mut b_blocks = Vec::with_capacity(m);
    let mut r_blocks = Vec::with_capacity(m);
    let mut e_trip = Vec::new();
    for i in 0..m {
        let width = rng.random_range(0..=cfg.max_width);
        let beta = rng.random_range(0.2..=1.0);
        let mut b_trip = Vec::new();
        for k in 0..width {
            // Occasionally an input only adds content elsewhere.
            if rng.random_bool(0.9) || n == 1 {
                b_trip.push((i, k, -beta));
            }
            for _ in 0..cfg.fan_out {
                let row = rng.random_range(0..n);
                if row != i {
                    b_trip.push((row, k, rng.random_range(0.0..=1.0)));
                }
            }
        }
        let block = SparseMatrix::from_triplets(n, width, b_trip).expect("indices in range");
        let d = block.min_entry().map_or(0.0, |v| -v.min(0.0));
        let (rows, vals) = a_row(&a, i);
        for (col, av) in rows.into_iter().zip(vals) {
            let frac = rng.random_range(0.5..=1.0);
            let ev = if d > 0.0 { av * frac / d } else { av * frac };
            e_trip.push((i, col, ev));
        }
        r_blocks.push((0..width).map(|_| rng.random_range(0.0..1.0)).collect());
        b_blocks.push(block);
    }
    let e = SparseMatrix::from_triplets(m, n, e_trip).expect("indices in range");
    let s =
        (0..n).map(|_| if rng.random_bool(cfg.zero_cost_prob) { 0.0 } else { rng.random_range(0.1..1.0) }).collect();
    ProblemData::new(n, m, a, b_blocks, e, s, r_blocks)
}

fn a_row(a: &SparseMatrix, row: usize) -> (Vec<usize>, Vec<f64>) {
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for (r, c, v) in a.iter() {
        if r == row {
            cols.push(c);
            vals.push(v);
        }
    }
    (cols, vals)
}

/// Graph whose every node reaches the target (node 1): node `k` gets an
/// edge towards a random lower-numbered node, plus `extra_edges` random
/// edges. State costs are positive except at the target.
pub fn random_route_graph(num_nodes: usize, extra_edges: usize, seed: u64) -> GraphSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (1..=num_nodes as u64)
        .map(|id| NodeSpec::new(id, if id == 1 { 0.0 } else { rng.random_range(0.1..2.0) }))
        .collect();
    let mut edges = Vec::new();
    for k in 2..=num_nodes as u64 {
        edges.push(EdgeSpec::new(k, rng.random_range(1..k), rng.random_range(0.0..3.0)));
    }
    for _ in 0..extra_edges {
        if num_nodes < 2 {
            break;
        }
        let o = rng.random_range(1..=num_nodes as u64);
        let d = rng.random_range(1..=num_nodes as u64);
        if o != d {
            edges.push(EdgeSpec::new(o, d, rng.random_range(0.0..3.0)));
        }
    }
    GraphSpec { nodes, edges, target: Some(1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::{value_iterate, SolveOptions, Status};
    use crate::model::validate;
    use crate::network::{build_shortest_path, shortest_path_oracle};

    #[test]
    fn random_instances_validate_and_converge() {
        for seed in 0..20 {
            let mut cfg = RandomConfig::new(12, seed);
            cfg.zero_cost_prob = 0.2;
            cfg.num_partitions = 8 + (seed as usize % 5);
            let prob = random_instance(&cfg);
            let report = validate(&prob);
            assert!(report.is_clean(), "seed {seed}: {:?}", report.violations);
            let r = value_iterate(&prob, &SolveOptions::default()).unwrap();
            assert_eq!(r.status, Status::FixedPoint, "seed {seed}");
        }
    }

    #[test]
    fn deterministic() {
        let cfg = RandomConfig::new(30, 4);
        assert_eq!(random_instance(&cfg), random_instance(&cfg));
        assert_ne!(random_instance(&cfg), random_instance(&RandomConfig::new(30, 5)));
    }

    #[test]
    fn route_graphs_reach_target() {
        let g = random_route_graph(15, 20, 3);
        assert!(shortest_path_oracle(&g).unwrap().iter().all(|d| d.is_finite()));
        assert!(validate(&build_shortest_path(&g).unwrap()).is_clean());
    }
}
