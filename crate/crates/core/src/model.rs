//! Problem data for the constrained positive system
//!
//! ```text
//! minimize   Σₜ sᵀx(t) + rᵀu(t)
//! subject to x(t+1) = A x(t) + B u(t),  u(t) ≥ 0,  𝟙ᵀuᵢ(t) ≤ Eᵢᵀ x(t)
//! ```
//!
//! together with the structural checks that make the nonnegative orthant
//! invariant: negative entries of block `Bᵢ` may only sit on row `i`, and
//! `A ≥ -diag(d) E ≥ 0` where `dᵢ = min{Bᵢ, 0}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    n: usize,
    num_partitions: usize,
    a: SparseMatrix,
    b_blocks: Vec<SparseMatrix>,
    e: SparseMatrix,
    s: Vec<f64>,
    r_blocks: Vec<Vec<f64>>,
}

impl ProblemData {
    /// Assembles an instance without checking it; see [`validate`].
    /// `num_partitions` is the declared `M` and is cross-checked against the
    /// block lists by validation.
    pub fn new(
        n: usize,
        num_partitions: usize,
        a: SparseMatrix,
        b_blocks: Vec<SparseMatrix>,
        e: SparseMatrix,
        s: Vec<f64>,
        r_blocks: Vec<Vec<f64>>,
    ) -> Self {
        Self { n, num_partitions, a, b_blocks, e, s, r_blocks }
    }

    /// Instance without inputs (`M = 0`).
    pub fn uncontrolled(a: SparseMatrix, s: Vec<f64>) -> Self {
        let n = s.len();
        Self::new(n, 0, a, Vec::new(), SparseMatrix::zeros(0, n), s, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b_blocks(&self) -> &[SparseMatrix] {
        &self.b_blocks
    }

    pub fn b_block(&self, i: usize) -> &SparseMatrix {
        &self.b_blocks[i]
    }

    pub fn e(&self) -> &SparseMatrix {
        &self.e
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn r_blocks(&self) -> &[Vec<f64>] {
        &self.r_blocks
    }

    pub fn r_block(&self, i: usize) -> &[f64] {
        &self.r_blocks[i]
    }

    /// Width `mᵢ` of each partition.
    pub fn partition_widths(&self) -> Vec<usize> {
        self.b_blocks.iter().map(SparseMatrix::ncols).collect()
    }

    /// Total input dimension `m = Σ mᵢ`.
    pub fn input_dim(&self) -> usize {
        self.b_blocks.iter().map(SparseMatrix::ncols).sum()
    }

    /// Offset of each partition inside the stacked input vector.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.b_blocks
            .iter()
            .map(|b| {
                let off = acc;
                acc += b.ncols();
                off
            })
            .collect()
    }

    /// `min{Bᵢ, 0}`: the smallest entry of block `i`, or zero if it has none negative.
    pub fn block_min_or_zero(&self, block: usize) -> Result<f64> {
        let b = self.b_blocks.get(block).ok_or(Error::IndexOutOfRange { index: block, len: self.b_blocks.len() })?;
        Ok(b.min_entry().map_or(0.0, |m| m.min(0.0)))
    }

    /// The block minima padded with zeros to length `n`.
    pub fn padded_block_minima(&self) -> Vec<f64> {
        (0..self.n).map(|i| if i < self.b_blocks.len() { self.block_min_or_zero(i).unwrap() } else { 0.0 }).collect()
    }

    /// Row `i` of `E` as a dense length-`n` vector.
    pub fn e_row(&self, i: usize) -> Vec<f64> {
        self.e.row_dense(i)
    }

    /// Returns an error describing the first dimension inconsistency, if any.
    pub fn check_dimensions(&self) -> Result<()> {
        match dimension_violations(self).into_iter().next() {
            Some(v) => Err(Error::Dimension(v.description)),
            None => Ok(()),
        }
    }

    /// `A x + B u`, with `u` the stacked input vector.
    pub fn successor(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut next = self.a.mul_vec(x);
        for (b, off) in self.b_blocks.iter().zip(self.block_offsets()) {
            let bu = b.mul_vec(&u[off..off + b.ncols()]);
            next.iter_mut().zip(bu).for_each(|(y, v)| *y += v);
        }
        next
    }

    /// Largest violation of `u ≥ 0` and `𝟙ᵀuᵢ ≤ Eᵢᵀx` (zero when feasible).
    pub fn input_infeasibility(&self, x: &[f64], u: &[f64]) -> f64 {
        let ex = self.e.mul_vec(x);
        let mut worst = u.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
        for (i, (b, off)) in self.b_blocks.iter().zip(self.block_offsets()).enumerate() {
            let total: f64 = u[off..off + b.ncols()].iter().sum();
            worst = worst.max(total - ex[i]);
        }
        worst
    }

    /// Stage cost `sᵀx + rᵀu`.
    pub fn stage_cost(&self, x: &[f64], u: &[f64]) -> f64 {
        let state: f64 = self.s.iter().zip(x).map(|(s, x)| s * x).sum();
        let input: f64 = self.r_blocks.iter().flatten().zip(u).map(|(r, u)| r * u).sum();
        state + input
    }

    /// Copy with `s` and every `rᵢ` multiplied by `factor`.
    pub fn with_scaled_costs(&self, factor: f64) -> Self {
        let mut p = self.clone();
        p.s.iter_mut().for_each(|v| *v *= factor);
        p.r_blocks.iter_mut().flatten().for_each(|v| *v *= factor);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Dimension { field: String },
    A { row: usize, col: usize },
    B { block: usize, row: usize, col: usize },
    E { row: usize, col: usize },
    S { index: usize },
    R { block: usize, index: usize },
    Partition { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Structure,
    AssumptionB,
    AssumptionA,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: Check,
    pub location: Location,
    pub description: String,
}

impl Violation {
    fn new(check: Check, location: Location, description: impl Into<String>) -> Self {
        Self { check, location, description: description.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Dimensions consistent, values finite, `s`, `r`, `E` nonnegative.
    pub structure_ok: bool,
    pub assumption_b_ok: bool,
    pub assumption_a_ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn from_violations(violations: Vec<Violation>) -> Self {
        let ok = |c: Check| !violations.iter().any(|v| v.check == c);
        Self {
            structure_ok: ok(Check::Structure),
            assumption_b_ok: ok(Check::AssumptionB),
            assumption_a_ok: ok(Check::AssumptionA),
            violations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Slack in every elementwise comparison; zero means exact.
    pub slack: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { slack: 0.0 }
    }
}

fn dimension_violations(p: &ProblemData) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut dim = |field: &str, msg: String| {
        out.push(Violation::new(Check::Structure, Location::Dimension { field: field.into() }, msg));
    };
    let n = p.n;
    if n == 0 {
        dim("n", "state dimension must be positive".into());
    }
    if p.a.shape() != (n, n) {
        dim("A", format!("A is {}x{}, expected {n}x{n}", p.a.nrows(), p.a.ncols()));
    }
    if p.s.len() != n {
        dim("s", format!("s has length {}, expected {n}", p.s.len()));
    }
    let m = p.num_partitions;
    if p.b_blocks.len() != m {
        dim("B_blocks", format!("{} B blocks, expected M = {m}", p.b_blocks.len()));
    }
    if p.r_blocks.len() != m {
        dim("r_blocks", format!("{} r blocks, expected M = {m}", p.r_blocks.len()));
    }
    if p.e.shape() != (m, n) {
        dim("E", format!("E is {}x{}, expected {m}x{n}", p.e.nrows(), p.e.ncols()));
    }
    for (i, b) in p.b_blocks.iter().enumerate() {
        if b.nrows() != n {
            dim("B_blocks", format!("block {i} has {} rows, expected {n}", b.nrows()));
        }
        if let Some(r) = p.r_blocks.get(i) {
            if r.len() != b.ncols() {
                dim("r_blocks", format!("r block {i} has length {}, B block {i} has {} columns", r.len(), b.ncols()));
            }
        }
    }
    out
}

fn sign_violations(p: &ProblemData, slack: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let finite = p.a.all_finite()
        && p.e.all_finite()
        && p.b_blocks.iter().all(SparseMatrix::all_finite)
        && p.s.iter().chain(p.r_blocks.iter().flatten()).all(|v| v.is_finite());
    if !finite {
        out.push(Violation::new(
            Check::Structure,
            Location::Dimension { field: "values".into() },
            "non-finite value present",
        ));
    }
    for (i, &v) in p.s.iter().enumerate() {
        if v < -slack {
            out.push(Violation::new(Check::Structure, Location::S { index: i }, format!("s[{i}] = {v} is negative")));
        }
    }
    for (b, r) in p.r_blocks.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if v < -slack {
                out.push(Violation::new(
                    Check::Structure,
                    Location::R { block: b, index: j },
                    format!("r[{b}][{j}] = {v} is negative"),
                ));
            }
        }
    }
    for (r, c, v) in p.e.iter() {
        if v < -slack {
            out.push(Violation::new(
                Check::Structure,
                Location::E { row: r, col: c },
                format!("E[{r}][{c}] = {v} is negative"),
            ));
        }
    }
    out
}

/// Negative entries of block `i` may only appear on row `i`.
pub fn check_assumption_b(p: &ProblemData, opts: &ValidationOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, b) in p.b_blocks.iter().enumerate() {
        if i >= p.n {
            out.push(Violation::new(
                Check::AssumptionB,
                Location::Partition { block: i },
                format!("partition {i} has no matching state row (M > n)"),
            ));
            continue;
        }
        for (row, col, v) in b.iter() {
            if row != i && v < -opts.slack {
                out.push(Violation::new(
                    Check::AssumptionB,
                    Location::B { block: i, row, col },
                    format!("B[{i}] has negative entry {v} at row {row}, only row {i} may be negative"),
                ));
            }
        }
    }
    out
}

/// `A ≥ -diag(d) E_pad ≥ 0` with `d` the padded block minima.
pub fn check_assumption_a(p: &ProblemData, opts: &ValidationOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.a.shape() != (p.n, p.n) || p.e.ncols() != p.n {
        return out;
    }
    let slack = opts.slack;
    let d = p.padded_block_minima();
    let mut bound_checked = std::collections::BTreeSet::new();
    for (row, col, ev) in p.e.iter() {
        if row >= p.n {
            continue;
        }
        let lower = -d[row] * ev;
        if lower < -slack {
            out.push(Violation::new(
                Check::AssumptionA,
                Location::E { row, col },
                format!("-min(B[{row}],0)*E[{row}][{col}] = {lower} is negative"),
            ));
        }
        let av = p.a.get(row, col);
        if av < lower - slack {
            out.push(Violation::new(
                Check::AssumptionA,
                Location::A { row, col },
                format!("A[{row}][{col}] = {av} is below -min(B[{row}],0)*E[{row}][{col}] = {lower}"),
            ));
        }
        bound_checked.insert((row, col));
    }
    for (row, col, av) in p.a.iter() {
        if !bound_checked.contains(&(row, col)) && av < -slack {
            out.push(Violation::new(
                Check::AssumptionA,
                Location::A { row, col },
                format!("A[{row}][{col}] = {av} is negative"),
            ));
        }
    }
    out
}

pub fn validate(p: &ProblemData) -> ValidationReport {
    validate_with(p, &ValidationOptions::default())
}

pub fn validate_with(p: &ProblemData, opts: &ValidationOptions) -> ValidationReport {
    let mut violations = dimension_violations(p);
    let dims_ok = violations.is_empty();
    violations.extend(sign_violations(p, opts.slack));
    if dims_ok {
        violations.extend(check_assumption_b(p, opts));
        violations.extend(check_assumption_a(p, opts));
    }
    ValidationReport::from_violations(violations)
}

/// Validates unless `allow_invalid` is set.
pub(crate) fn require_valid(p: &ProblemData, allow_invalid: bool) -> Result<()> {
    p.check_dimensions()?;
    if allow_invalid {
        return Ok(());
    }
    let report = validate(p);
    if report.is_clean() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(Box::new(report)))
    }
}
