//! Small reference instances used across tests, benches and docs.

use crate::linalg::SparseMatrix;
use crate::model::ProblemData;
use crate::network::{EdgeSpec, GraphSpec, NodeSpec};

/// Node-link incidence matrix of the four-node routing example, one column
/// per directed edge, columns grouped by origin node.
pub const EXAMPLE1_B: [[f64; 10]; 4] = [
    [-1.0, -1.0, -1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, -1.0, -1.0, -1.0],
];
pub const EXAMPLE1_S: [f64; 4] = [1.0, 1.0, 1.0, 0.0];
pub const EXAMPLE1_R: [f64; 10] = [0.0, 0.0, 2.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 1.0];
pub const EXAMPLE1_WIDTHS: [usize; 4] = [3, 2, 2, 3];
/// Optimal cost coefficients of the example.
pub const EXAMPLE1_P: [f64; 4] = [2.0, 1.0, 2.0, 0.0];

/// Shortest path from node 1 to node 4 as a control problem: `A = E = I`,
/// `B` the incidence matrix above.
pub fn example1() -> ProblemData {
    let n = 4;
    let mut blocks = Vec::new();
    let mut r_blocks = Vec::new();
    let mut col = 0;
    for &w in &EXAMPLE1_WIDTHS {
        let block: Vec<Vec<f64>> = EXAMPLE1_B.iter().map(|row| row[col..col + w].to_vec()).collect();
        blocks.push(SparseMatrix::from_dense(&block, w).unwrap());
        r_blocks.push(EXAMPLE1_R[col..col + w].to_vec());
        col += w;
    }
    ProblemData::new(n, 4, SparseMatrix::identity(n), blocks, SparseMatrix::identity(n), EXAMPLE1_S.to_vec(), r_blocks)
}

/// The graph behind [`example1`], edges listed in column order.
pub fn example1_graph() -> GraphSpec {
    let edges = [
        (1, 2, 0.0),
        (1, 3, 0.0),
        (1, 4, 2.0),
        (2, 4, 0.0),
        (2, 1, 0.0),
        (3, 4, 1.0),
        (3, 1, 0.0),
        (4, 1, 2.0),
        (4, 2, 0.0),
        (4, 3, 1.0),
    ];
    GraphSpec {
        nodes: (1..=4).map(|id| NodeSpec::new(id, EXAMPLE1_S[id as usize - 1])).collect(),
        edges: edges.iter().map(|&(o, d, c)| EdgeSpec::new(o, d, c)).collect(),
        target: Some(4),
    }
}

/// `x⁺ = x`, cost `x` per step and no inputs: the value is infinite.
pub fn scalar_divergent() -> ProblemData {
    ProblemData::uncontrolled(SparseMatrix::identity(1), vec![1.0])
}
