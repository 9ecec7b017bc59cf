//! Optimal stationary feedback from a converged cost vector.
//!
//! In partition `i` the controller spends the whole budget `Eᵢᵀx` on the input
//! with the most negative reduced cost `rᵢ + Bᵢᵀp`, or does nothing when no
//! reduced cost is negative. The gain `K` therefore has at most one nonzero
//! row per partition, and that row is `Eᵢᵀ`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::bellman::bellman_residual;
use crate::error::{Error, Result};
use crate::io::matrix_triplets_json;
use crate::linalg::{dot, sup_norm, SparseMatrix};
use crate::model::{require_valid, ProblemData};

pub const DEFAULT_POLICY_TOL: f64 = 1e-6;
/// Reduced costs in `(-EPS_NEG, 0)` count as nonnegative.
pub const EPS_NEG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Choice {
    NoAction,
    /// Index into the partition, zero-based.
    Selected(usize),
}

impl Choice {
    pub fn index(self) -> Option<usize> {
        match self {
            Choice::NoAction => None,
            Choice::Selected(j) => Some(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Policy {
    pub choices: Vec<Choice>,
    pub reduced_costs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct PolicyOptions {
    /// Largest Bellman residual accepted for `p`.
    pub policy_tol: f64,
    pub eps_neg: f64,
    pub allow_invalid: bool,
}

impl Default for PolicyOptions {
    fn default() -> Self {
        Self { policy_tol: DEFAULT_POLICY_TOL, eps_neg: EPS_NEG, allow_invalid: false }
    }
}

/// `rᵢ + Bᵢᵀp` for every partition.
pub fn reduced_costs(prob: &ProblemData, p: &[f64]) -> Vec<Vec<f64>> {
    prob.b_blocks()
        .iter()
        .zip(prob.r_blocks())
        .map(|(b, r)| (0..b.ncols()).map(|j| r[j] + b.col_dot(j, p)).collect())
        .collect()
}

/// Lowest index of the minimal entry, when that entry is below `-eps_neg`.
pub fn select(reduced: &[f64], eps_neg: f64) -> Choice {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in reduced.iter().enumerate() {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((j, v));
        }
    }
    match best {
        Some((j, v)) if v < -eps_neg => Choice::Selected(j),
        _ => Choice::NoAction,
    }
}

pub fn extract_policy(prob: &ProblemData, p: &[f64]) -> Result<Policy> {
    extract_policy_with(prob, p, &PolicyOptions::default())
}

pub fn extract_policy_with(prob: &ProblemData, p: &[f64], opts: &PolicyOptions) -> Result<Policy> {
    require_valid(prob, opts.allow_invalid)?;
    let residual = bellman_residual(prob, p)?;
    if !(residual <= opts.policy_tol) {
        return Err(Error::StaleCostVector { residual, tol: opts.policy_tol });
    }
    let reduced = reduced_costs(prob, p);
    let choices = reduced.iter().map(|rc| select(rc, opts.eps_neg)).collect();
    Ok(Policy { choices, reduced_costs: reduced })
}

fn check_policy_shape(prob: &ProblemData, pol: &Policy) -> Result<()> {
    prob.check_dimensions()?;
    if pol.choices.len() != prob.num_partitions() {
        return Err(Error::Dimension(format!(
            "policy has {} partitions, instance has {}",
            pol.choices.len(),
            prob.num_partitions()
        )));
    }
    for (i, (c, w)) in pol.choices.iter().zip(prob.partition_widths()).enumerate() {
        if let Choice::Selected(j) = c {
            if *j >= w {
                return Err(Error::Dimension(format!("partition {i} selects input {j} of {w}")));
            }
        }
    }
    Ok(())
}

/// The `m × n` feedback gain: row `offsetᵢ + j` equals `Eᵢᵀ` when partition `i`
/// selects input `j`, every other row is zero.
pub fn assemble_gain(prob: &ProblemData, pol: &Policy) -> Result<SparseMatrix> {
    check_policy_shape(prob, pol)?;
    let e_t = prob.e().transpose();
    let mut triplets = Vec::new();
    for ((i, choice), off) in pol.choices.iter().enumerate().zip(prob.block_offsets()) {
        if let Choice::Selected(j) = choice {
            let (cols, vals) = e_t.col(i);
            triplets.extend(cols.iter().zip(vals).map(|(&c, &v)| (off + j, c, v)));
        }
    }
    SparseMatrix::from_triplets(prob.input_dim(), prob.n(), triplets)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub stage_costs: Vec<f64>,
    pub total_cost: f64,
}

impl Trajectory {
    /// `t,x_1..x_n,cost_t,total`; the terminal state row has an empty cost.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x_{i}"));
        }
        out.push_str(",cost_t,total\n");
        let mut total = 0.0;
        for (t, x) in self.states.iter().enumerate() {
            out.push_str(&t.to_string());
            for v in x {
                out.push_str(&format!(",{v}"));
            }
            match self.stage_costs.get(t) {
                Some(c) => {
                    total += c;
                    out.push_str(&format!(",{c},{total}\n"));
                }
                None => out.push_str(&format!(",,{total}\n")),
            }
        }
        out
    }
}

fn simulation_tol(x: &[f64]) -> f64 {
    1e-12 * (1.0 + sup_norm(x))
}

/// Runs `x(t+1) = A x(t) + B K x(t)` for `steps` steps and checks every input
/// and state on the way.
pub fn simulate_closed_loop(prob: &ProblemData, pol: &Policy, x0: &[f64], steps: usize) -> Result<Trajectory> {
    let gain = assemble_gain(prob, pol)?;
    if x0.len() != prob.n() {
        return Err(Error::Dimension(format!("initial state has length {}, expected {}", x0.len(), prob.n())));
    }
    if let Some(v) = x0.iter().find(|&&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("initial state must be nonnegative, found {v}")));
    }
    let mut states = vec![x0.to_vec()];
    let mut inputs = Vec::with_capacity(steps);
    let mut stage_costs = Vec::with_capacity(steps);
    let mut total_cost = 0.0;
    for t in 0..steps {
        let x = &states[t];
        let u = gain.mul_vec(x);
        let infeasible = prob.input_infeasibility(x, &u);
        if infeasible > simulation_tol(x) {
            return Err(Error::Infeasible { step: t, detail: format!("input constraint violated by {infeasible:e}") });
        }
        let cost = prob.stage_cost(x, &u);
        let next = prob.successor(x, &u);
        if let Some((i, v)) = next.iter().enumerate().find(|(_, &v)| v < -simulation_tol(x)) {
            return Err(Error::Infeasible { step: t + 1, detail: format!("state x_{} = {v:e} is negative", i + 1) });
        }
        total_cost += cost;
        stage_costs.push(cost);
        inputs.push(u);
        states.push(next);
    }
    Ok(Trajectory { states, inputs, stage_costs, total_cost })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostCheck {
    pub achieved: f64,
    pub predicted: f64,
    /// `pᵀx(T)`, the cost still owed after the horizon.
    pub tail: f64,
    pub ok: bool,
}

/// Compares the simulated cost over `steps` with the prediction `pᵀx₀`.
pub fn verify_cost(
    prob: &ProblemData,
    pol: &Policy,
    p: &[f64],
    x0: &[f64],
    steps: usize,
    tail_tol: f64,
) -> Result<CostCheck> {
    let traj = simulate_closed_loop(prob, pol, x0, steps)?;
    let predicted = dot(p, x0);
    let tail = dot(p, traj.states.last().unwrap());
    let achieved = traj.total_cost;
    Ok(CostCheck { achieved, predicted, tail, ok: (achieved - predicted).abs() <= tail_tol + tail })
}

/// `{"choices": [j | null, ...], "reduced_costs": [...], "gain": {triplets}}`.
pub fn policy_json(prob: &ProblemData, pol: &Policy) -> Result<Value> {
    let gain = assemble_gain(prob, pol)?;
    Ok(json!({
        "choices": pol.choices.iter().map(|c| c.index()).collect::<Vec<_>>(),
        "reduced_costs": pol.reduced_costs,
        "gain": matrix_triplets_json(&gain),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example1, EXAMPLE1_P};

    fn example_policy() -> Policy {
        extract_policy(&example1(), &EXAMPLE1_P).unwrap()
    }

    #[test]
    fn example1_choices_and_reduced_costs() {
        let pol = example_policy();
        assert_eq!(pol.choices, vec![Choice::Selected(0), Choice::Selected(0), Choice::Selected(0), Choice::NoAction]);
        assert_eq!(
            pol.reduced_costs,
            vec![vec![-1.0, 0.0, 0.0], vec![-1.0, 1.0], vec![-1.0, 0.0], vec![4.0, 1.0, 3.0]]
        );
    }

    #[test]
    fn stale_vector_rejected() {
        let err = extract_policy(&example1(), &[1.0, 1.0, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::StaleCostVector { .. }));
    }

    #[test]
    fn zero_price_positive_costs_do_nothing() {
        let p = example1();
        let r_blocks: Vec<Vec<f64>> = p.r_blocks().iter().map(|r| r.iter().map(|v| v + 1.0).collect()).collect();
        let q = ProblemData::new(4, 4, p.a().clone(), p.b_blocks().to_vec(), p.e().clone(), vec![0.0; 4], r_blocks);
        let pol = extract_policy(&q, &[0.0; 4]).unwrap();
        assert!(pol.choices.iter().all(|c| *c == Choice::NoAction));
        assert_eq!(assemble_gain(&q, &pol).unwrap().nnz(), 0);
    }

    #[test]
    fn ties_pick_lowest_index() {
        assert_eq!(select(&[-1.0, -1.0], EPS_NEG), Choice::Selected(0));
        assert_eq!(select(&[0.5, -2.0, -2.0], EPS_NEG), Choice::Selected(1));
        assert_eq!(select(&[-1e-12, 3.0], EPS_NEG), Choice::NoAction);
        assert_eq!(select(&[], EPS_NEG), Choice::NoAction);
    }

    #[test]
    fn example1_gain_rows() {
        let gain = assemble_gain(&example1(), &example_policy()).unwrap();
        assert_eq!(gain.shape(), (10, 4));
        let dense = gain.to_dense();
        let nonzero: Vec<usize> = (0..10).filter(|&r| dense[r].iter().any(|&v| v != 0.0)).collect();
        assert_eq!(nonzero, vec![0, 3, 5]);
        assert_eq!(dense[0], vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(dense[3], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(dense[5], vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn gain_places_constraint_row() {
        let b = SparseMatrix::from_dense(&[vec![-1.0, -1.0, -1.0], vec![1.0, 0.5, 0.0]], 3).unwrap();
        let e = SparseMatrix::from_dense(&[vec![1.0, 2.0]], 2).unwrap();
        let prob = ProblemData::new(2, 1, SparseMatrix::identity(2), vec![b], e, vec![1.0, 1.0], vec![vec![0.0; 3]]);
        let pol = Policy { choices: vec![Choice::Selected(1)], reduced_costs: vec![vec![0.0; 3]] };
        let gain = assemble_gain(&prob, &pol).unwrap();
        assert_eq!(gain.to_dense(), vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![0.0, 0.0]]);
        let bad = Policy { choices: vec![Choice::Selected(3)], reduced_costs: vec![] };
        assert!(assemble_gain(&prob, &bad).is_err());
    }

    #[test]
    fn example1_closed_loop_from_node1() {
        let traj = simulate_closed_loop(&example1(), &example_policy(), &[1.0, 0.0, 0.0, 0.0], 5).unwrap();
        assert_eq!(traj.states[1], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(traj.states[2], vec![0.0, 0.0, 0.0, 1.0]);
        assert!(traj.states[2..].iter().all(|x| *x == vec![0.0, 0.0, 0.0, 1.0]));
        assert_eq!(traj.stage_costs, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(traj.total_cost, 2.0);
    }

    #[test]
    fn trivial_simulations() {
        let pol = example_policy();
        let zero = simulate_closed_loop(&example1(), &pol, &[0.0; 4], 4).unwrap();
        assert!(zero.states.iter().all(|x| x.iter().all(|&v| v == 0.0)));
        assert_eq!(zero.total_cost, 0.0);
        let none = simulate_closed_loop(&example1(), &pol, &[1.0, 2.0, 0.0, 0.0], 0).unwrap();
        assert_eq!(none.states.len(), 1);
        assert_eq!(none.total_cost, 0.0);
        assert!(simulate_closed_loop(&example1(), &pol, &[-1.0, 0.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn cost_verification() {
        let (prob, pol) = (example1(), example_policy());
        let c = verify_cost(&prob, &pol, &EXAMPLE1_P, &[1.0, 0.0, 0.0, 0.0], 10, 1e-9).unwrap();
        assert_eq!((c.achieved, c.predicted, c.ok), (2.0, 2.0, true));
        let c = verify_cost(&prob, &pol, &EXAMPLE1_P, &[0.0, 0.0, 0.0, 1.0], 10, 1e-9).unwrap();
        assert_eq!((c.achieved, c.predicted, c.ok), (0.0, 0.0, true));
        let c = verify_cost(&prob, &pol, &EXAMPLE1_P, &[1.0; 4], 2, 1e-9).unwrap();
        assert_eq!((c.achieved, c.predicted, c.ok), (5.0, 5.0, true));
    }

    #[test]
    fn trajectory_csv() {
        let traj = simulate_closed_loop(&example1(), &example_policy(), &[1.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(traj.to_csv(), "t,x_1,x_2,x_3,x_4,cost_t,total\n0,1,0,0,0,1,1\n1,0,1,0,0,1,2\n2,0,0,0,1,,2\n");
    }

    #[test]
    fn policy_json_shape() {
        let v = policy_json(&example1(), &example_policy()).unwrap();
        assert_eq!(v["choices"], json!([0, 0, 0, null]));
        assert_eq!(v["gain"]["shape"], json!([10, 4]));
        assert_eq!(v["gain"]["rows"], json!([0, 3, 5]));
    }
}
