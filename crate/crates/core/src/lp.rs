//! The linear program equivalent to the Bellman fixed point, with LP and MPS
//! writers and certificate checks.
//!
//! Variables are `p ∈ ℝⁿ₊` followed by `z ∈ ℝᴹ₊`:
//!
//! ```text
//! maximize   𝟙ᵀp
//! subject to (I − Aᵀ)p + Σᵢ zᵢEᵢ ≤ s          (bell_k, one per state)
//!            −Bᵢⱼᵀp − zᵢ ≤ rᵢⱼ               (red_i_j, one per input)
//! ```
//!
//! At an optimum `zᵢ = −min{rᵢ + Bᵢᵀp, 0}`, so the Bellman rows read
//! `p ≤ T(p)`. [`LpForm::AsPrinted`] flips the reduced-cost rows to
//! `Bᵢⱼᵀp − zᵢ ≤ −rᵢⱼ` for comparison with the alternative sign convention.

use std::fmt::Write;

use serde::Serialize;

use crate::bellman::partition_minima;
use crate::error::Result;
use crate::exec::Execution;
use crate::model::ProblemData;

pub const DEFAULT_LP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpForm {
    #[default]
    Corrected,
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub name: String,
    /// `(variable index, coefficient)`, indices ascending, no zeros.
    pub coeffs: Vec<(usize, f64)>,
    /// Every row is `coeffs · v ≤ rhs`.
    pub rhs: f64,
}

impl LpRow {
    fn eval(&self, v: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, c)| c * v[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub n: usize,
    pub num_z: usize,
    /// Bellman rows first, then reduced-cost rows by partition and column.
    pub rows: Vec<LpRow>,
    pub form: LpForm,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.n + self.num_z
    }

    pub fn var_name(&self, j: usize) -> String {
        if j < self.n {
            format!("p_{}", j + 1)
        } else {
            format!("z_{}", j - self.n + 1)
        }
    }

    pub fn bellman_rows(&self) -> &[LpRow] {
        &self.rows[..self.n]
    }

    pub fn reduced_rows(&self) -> &[LpRow] {
        &self.rows[self.n..]
    }
}

fn compact(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coeffs.sort_by_key(|c| c.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
    for (j, c) in coeffs {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += c,
            _ => out.push((j, c)),
        }
    }
    out.retain(|c| c.1 != 0.0);
    out
}

pub fn build_lp(prob: &ProblemData) -> Result<LpModel> {
    build_lp_with(prob, LpForm::Corrected)
}

pub fn build_lp_with(prob: &ProblemData, form: LpForm) -> Result<LpModel> {
    prob.check_dimensions()?;
    let n = prob.n();
    let num_z = prob.num_partitions();
    let mut rows = Vec::with_capacity(n + prob.input_dim());

    for k in 0..n {
        let mut coeffs = vec![(k, 1.0)];
        let (a_rows, a_vals) = prob.a().col(k);
        coeffs.extend(a_rows.iter().zip(a_vals).map(|(&j, &v)| (j, -v)));
        let (e_rows, e_vals) = prob.e().col(k);
        coeffs.extend(e_rows.iter().zip(e_vals).map(|(&i, &v)| (n + i, v)));
        rows.push(LpRow { name: format!("bell_{}", k + 1), coeffs: compact(coeffs), rhs: prob.s()[k] });
    }

    let sign = match form {
        LpForm::Corrected => -1.0,
        LpForm::AsPrinted => 1.0,
    };
    for (i, (b, r)) in prob.b_blocks().iter().zip(prob.r_blocks()).enumerate() {
        for j in 0..b.ncols() {
            let (b_rows, b_vals) = b.col(j);
            let mut coeffs: Vec<(usize, f64)> = b_rows.iter().zip(b_vals).map(|(&row, &v)| (row, sign * v)).collect();
            coeffs.push((n + i, -1.0));
            rows.push(LpRow { name: format!("red_{}_{}", i + 1, j + 1), coeffs: compact(coeffs), rhs: -sign * r[j] });
        }
    }
    Ok(LpModel { n, num_z, rows, form })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub max_violation: f64,
}

pub fn check_feasible(model: &LpModel, p: &[f64], z: &[f64]) -> Feasibility {
    check_feasible_with(model, p, z, DEFAULT_LP_TOL)
}

/// Row and bound violations of `(p, z)`; dimension mismatches count as
/// infinitely violated.
pub fn check_feasible_with(model: &LpModel, p: &[f64], z: &[f64], tol: f64) -> Feasibility {
    if p.len() != model.n || z.len() != model.num_z {
        return Feasibility { feasible: false, max_violation: f64::INFINITY };
    }
    let v: Vec<f64> = p.iter().chain(z).copied().collect();
    let bounds = v.iter().fold(0.0_f64, |acc, &x| acc.max(-x));
    let max_violation = model.rows.iter().fold(bounds, |acc, row| acc.max(row.eval(&v) - row.rhs));
    Feasibility { feasible: max_violation <= tol, max_violation }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub feasible: bool,
    pub max_violation: f64,
    pub z: Vec<f64>,
    /// Bellman rows holding with equality, zero-based.
    pub tight_rows: Vec<usize>,
    pub all_tight: bool,
}

impl Certificate {
    /// Feasible with every Bellman row tight: `p` solves the fixed-point equation.
    pub fn certifies(&self) -> bool {
        self.feasible && self.all_tight
    }
}

pub fn certify_optimal(prob: &ProblemData, p: &[f64]) -> Result<Certificate> {
    certify_optimal_with(prob, p, DEFAULT_LP_TOL)
}

/// Completes `p` with `zᵢ = −min{rᵢ + Bᵢᵀp, 0}` and checks the result.
pub fn certify_optimal_with(prob: &ProblemData, p: &[f64], tol: f64) -> Result<Certificate> {
    let model = build_lp(prob)?;
    if p.len() != prob.n() {
        return Err(crate::Error::Dimension(format!("cost vector has length {}, expected {}", p.len(), prob.n())));
    }
    let z: Vec<f64> =
        partition_minima(prob, p, Execution::Sequential).into_iter().map(|q| if q < 0.0 { -q } else { 0.0 }).collect();
    let feas = check_feasible_with(&model, p, &z, tol);
    let v: Vec<f64> = p.iter().chain(&z).copied().collect();
    let tight_rows: Vec<usize> = model
        .bellman_rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| (row.eval(&v) - row.rhs).abs() <= tol)
        .map(|(k, _)| k)
        .collect();
    Ok(Certificate {
        feasible: feas.feasible,
        max_violation: feas.max_violation,
        all_tight: tight_rows.len() == prob.n(),
        z,
        tight_rows,
    })
}

fn push_term(out: &mut String, first: bool, coef: f64, name: &str) {
    let mag = coef.abs();
    let sign = if coef < 0.0 { "-" } else { "+" };
    match (first, coef < 0.0) {
        (true, false) => {}
        (true, true) => out.push_str("- "),
        (false, _) => {
            out.push_str(sign);
            out.push(' ');
        }
    }
    if mag != 1.0 {
        let _ = write!(out, "{mag} ");
    }
    out.push_str(name);
    out.push(' ');
}

/// CPLEX-style LP text. Ordering is fixed: variables by index, Bellman rows
/// before reduced-cost rows.
pub fn export_lp_text(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ linear-cost Bellman program\n");
    out.push_str("Maximize\n obj: ");
    for j in 0..model.n {
        push_term(&mut out, j == 0, 1.0, &model.var_name(j));
    }
    out.pop();
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}: ", row.name);
        if row.coeffs.is_empty() {
            // LP files need at least one term per row.
            out.push_str("0 p_1 ");
        }
        for (k, &(j, c)) in row.coeffs.iter().enumerate() {
            push_term(&mut out, k == 0, c, &model.var_name(j));
        }
        let _ = writeln!(out, "<= {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..model.num_vars() {
        let _ = writeln!(out, " {} >= 0", model.var_name(j));
    }
    out.push_str("End\n");
    out
}

/// Fixed-column MPS. MPS has no portable maximize, so the objective is
/// written negated: minimize `−𝟙ᵀp`.
pub fn export_mps_text(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("* linear-cost Bellman program; objective negated (maximize 1'p)\n");
    out.push_str("NAME          POSFLOW\n");
    out.push_str("ROWS\n");
    out.push_str(" N  obj\n");
    for row in &model.rows {
        let _ = writeln!(out, " L  {}", row.name);
    }

    let mut columns: Vec<Vec<(&str, f64)>> = vec![Vec::new(); model.num_vars()];
    for j in 0..model.n {
        columns[j].push(("obj", -1.0));
    }
    for row in &model.rows {
        for &(j, c) in &row.coeffs {
            columns[j].push((row.name.as_str(), c));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, entries) in columns.iter().enumerate() {
        let name = model.var_name(j);
        if entries.is_empty() {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, "obj", 0);
        }
        for (row, c) in entries {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, row, c);
        }
    }
    out.push_str("RHS\n");
    for row in model.rows.iter().filter(|r| r.rhs != 0.0) {
        let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", row.name, row.rhs);
    }
    out.push_str("BOUNDS\n");
    for j in 0..model.num_vars() {
        let _ = writeln!(out, " {:<2} {:<8}  {:<8}  {:>12}", "LO", "BND", model.var_name(j), 0);
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example1, EXAMPLE1_P};
    use crate::linalg::SparseMatrix;

    #[test]
    fn example1_dimensions() {
        let m = build_lp(&example1()).unwrap();
        assert_eq!(m.num_vars(), 8);
        assert_eq!(m.bellman_rows().len(), 4);
        assert_eq!(m.reduced_rows().len(), 10);
        // z enters Bellman rows with nonnegative coefficients.
        for row in m.bellman_rows() {
            assert!(row.coeffs.iter().filter(|c| c.0 >= m.n).all(|c| c.1 >= 0.0));
        }
    }

    #[test]
    fn no_inputs_has_only_bellman_rows() {
        let p = ProblemData::uncontrolled(SparseMatrix::zeros(1, 1), vec![1.0]);
        let m = build_lp(&p).unwrap();
        assert_eq!(m.rows.len(), 1);
        assert_eq!(m.num_vars(), 1);
        let text = export_lp_text(&m);
        assert!(text.contains(" bell_1: p_1 <= 1\n"), "{text}");
    }

    #[test]
    fn bounds_list_z() {
        let text = export_lp_text(&build_lp(&example1()).unwrap());
        for i in 1..=4 {
            assert!(text.contains(&format!(" z_{i} >= 0\n")));
        }
    }

    #[test]
    fn example1_certificate_point_is_feasible() {
        let m = build_lp(&example1()).unwrap();
        let f = check_feasible(&m, &EXAMPLE1_P, &[1.0, 1.0, 1.0, 0.0]);
        assert!(f.feasible);
        assert_eq!(f.max_violation, 0.0);

        let f = check_feasible(&m, &[3.0, 1.0, 2.0, 0.0], &[1.0, 1.0, 1.0, 0.0]);
        assert!(!f.feasible);
        assert_eq!(f.max_violation, 1.0);

        let f = check_feasible(&m, &[0.0; 4], &[0.0; 4]);
        assert!(f.feasible);
    }

    #[test]
    fn certify_example1() {
        let c = certify_optimal(&example1(), &EXAMPLE1_P).unwrap();
        assert!(c.feasible && c.all_tight && c.certifies());
        assert_eq!(c.z, vec![1.0, 1.0, 1.0, 0.0]);
        assert_eq!(c.tight_rows, vec![0, 1, 2, 3]);

        let c = certify_optimal(&example1(), &[0.0; 4]).unwrap();
        assert!(c.feasible);
        assert_eq!(c.z, vec![0.0; 4]);
        // Row 4 has s = 0 and stays tight; rows 1-3 have slack s_i = 1.
        assert_eq!(c.tight_rows, vec![3]);
        assert!(!c.certifies());
    }

    #[test]
    fn printed_form_flips_reduced_rows() {
        let corrected = build_lp(&example1()).unwrap();
        let printed = build_lp_with(&example1(), LpForm::AsPrinted).unwrap();
        assert_eq!(corrected.bellman_rows(), printed.bellman_rows());
        let (c, p) = (&corrected.reduced_rows()[2], &printed.reduced_rows()[2]);
        assert_eq!(c.coeffs, vec![(0, 1.0), (3, -1.0), (4, -1.0)]);
        assert_eq!(c.rhs, 2.0);
        assert_eq!(p.coeffs, vec![(0, -1.0), (3, 1.0), (4, -1.0)]);
        assert_eq!(p.rhs, -2.0);
        // z = 0 is feasible for the printed reduced rows only if B^T p <= -r.
        assert!(check_feasible(&printed, &EXAMPLE1_P, &[1.0, 1.0, 1.0, 0.0]).max_violation > 0.0);
    }

    #[test]
    fn export_is_deterministic() {
        let m = build_lp(&example1()).unwrap();
        assert_eq!(export_lp_text(&m), export_lp_text(&build_lp(&example1()).unwrap()));
        assert_eq!(export_mps_text(&m), export_mps_text(&m));
    }
}
