//! The Bellman operator on linear cost functions and monotone value iteration.
//!
//! For `J(x) = pᵀx` one Bellman step is again linear, with coefficients
//!
//! ```text
//! T(p) = s + Aᵀp + Σᵢ min{rᵢ + Bᵢᵀp, 0} Eᵢ
//! ```
//!
//! where `min{v, 0}` is the smallest entry of `v` clamped at zero. Iterating
//! from `p₀ = 0` gives a nondecreasing sequence that converges to the optimal
//! cost exactly when the control problem has finite value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{sup_dist, sup_norm};
use crate::model::{require_valid, ProblemData};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_DIVERGENCE_CAP: f64 = 1e12;

/// Iterations between growth-ray divergence checks.
const RAY_CHECK_INTERVAL: usize = 16;

/// `min{rᵢ + Bᵢᵀp, 0}` for every partition.
pub fn partition_minima(prob: &ProblemData, p: &[f64], exec: Execution) -> Vec<f64> {
    partition_minima_impl(prob, p, true, exec)
}

fn partition_minima_impl(prob: &ProblemData, p: &[f64], with_costs: bool, exec: Execution) -> Vec<f64> {
    let blocks = prob.b_blocks();
    exec::map_indices(exec, blocks.len(), |i| {
        let b = &blocks[i];
        let r = prob.r_block(i);
        (0..b.ncols()).fold(0.0_f64, |acc, j| {
            let cost = if with_costs { r[j] } else { 0.0 };
            acc.min(cost + b.col_dot(j, p))
        })
    })
}

fn apply_impl(prob: &ProblemData, p: &[f64], with_costs: bool, exec: Execution) -> Vec<f64> {
    let q = partition_minima_impl(prob, p, with_costs, exec);
    let (a, e, s) = (prob.a(), prob.e(), prob.s());
    exec::map_indices(exec, prob.n(), |k| {
        let base = if with_costs { s[k] } else { 0.0 };
        base + a.col_dot(k, p) + e.col_dot(k, &q)
    })
}

fn check_len(prob: &ProblemData, p: &[f64]) -> Result<()> {
    prob.check_dimensions()?;
    if p.len() != prob.n() {
        return Err(Error::Dimension(format!("cost vector has length {}, expected n = {}", p.len(), prob.n())));
    }
    Ok(())
}

/// One application of the Bellman operator.
pub fn bellman_apply(prob: &ProblemData, p: &[f64]) -> Result<Vec<f64>> {
    bellman_apply_with(prob, p, Execution::Auto)
}

pub fn bellman_apply_with(prob: &ProblemData, p: &[f64], exec: Execution) -> Result<Vec<f64>> {
    check_len(prob, p)?;
    Ok(apply_impl(prob, p, true, exec))
}

/// The operator with `s = 0`, `r = 0`; it bounds the growth of `T` along a
/// direction: `T(p + λd) ≥ T(p) + λ·T₀(d)` for `λ ≥ 0`.
pub fn homogeneous_apply(prob: &ProblemData, d: &[f64]) -> Result<Vec<f64>> {
    check_len(prob, d)?;
    Ok(apply_impl(prob, d, false, Execution::Auto))
}

/// `‖T(p) − p‖∞`.
pub fn bellman_residual(prob: &ProblemData, p: &[f64]) -> Result<f64> {
    Ok(sup_dist(&bellman_apply(prob, p)?, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    FixedPoint,
    Diverged,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceWitness {
    /// `‖p‖∞` crossed the divergence cap.
    Cap,
    /// The increment `d = T(p) − p` satisfies `0 ≠ d ≤ T₀(d)`, so the
    /// iterates grow at least linearly along `d` forever.
    GrowthRay,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: Status,
    pub p: Vec<f64>,
    pub iterations: usize,
    pub residual_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceWitness>,
    #[serde(skip)]
    pub per_coordinate_trace: Option<Vec<Vec<f64>>>,
}

impl SolveReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_trace.last().copied()
    }

    /// The per-coordinate trace as CSV, `iter,p_1,...,p_n`; row `k` holds the
    /// iterate `p_k` that entered iteration `k`.
    pub fn trace_csv(&self) -> Option<String> {
        let trace = self.per_coordinate_trace.as_ref()?;
        Some(coordinate_csv("iter", self.p.len(), trace.iter().enumerate().map(|(k, p)| (k, p.as_slice()))))
    }
}

pub(crate) fn coordinate_csv<'a>(key: &str, n: usize, rows: impl Iterator<Item = (usize, &'a [f64])>) -> String {
    let mut out = String::from(key);
    for i in 1..=n {
        out.push_str(&format!(",p_{i}"));
    }
    out.push('\n');
    for (k, p) in rows {
        out.push_str(&k.to_string());
        for v in p {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_cap: f64,
    /// Start from this vector instead of zero. It should satisfy `p₀ ≤ T(p₀)`
    /// for the iterates to stay monotone.
    pub warm_start: Option<Vec<f64>>,
    pub record_trace: bool,
    /// Solve instances that fail validation. Positivity is no longer
    /// guaranteed and only the cap detects divergence.
    pub allow_invalid: bool,
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            divergence_cap: DEFAULT_DIVERGENCE_CAP,
            warm_start: None,
            record_trace: false,
            allow_invalid: false,
            exec: Execution::Auto,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_divergence_cap(mut self, cap: f64) -> Self {
        self.divergence_cap = cap;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "divergence cap must be positive, got {}",
                self.divergence_cap
            )));
        }
        Ok(())
    }
}

/// True when `0 ≤ d ≤ T(p) − p`, `d ≠ 0` and `d ≤ T₀(d)` for `d` the
/// increment with negligible coordinates dropped. By monotonicity of `T`
/// this forces `p_{k+j} ≥ p_k + j·d`.
fn growth_ray(prob: &ProblemData, increment: &[f64], exec: Execution) -> bool {
    let peak = increment.iter().fold(0.0_f64, |a, &b| a.max(b));
    if peak <= 0.0 {
        return false;
    }
    let floor = peak * 1e-6;
    let d: Vec<f64> = increment.iter().map(|&v| if v >= floor { v } else { 0.0 }).collect();
    let t0 = apply_impl(prob, &d, false, exec);
    d.iter().zip(&t0).all(|(di, ti)| di <= ti)
}

/// Value iteration `p_{k+1} = T(p_k)` from `p₀ = 0` (or the warm start).
///
/// Stops with [`Status::FixedPoint`] as soon as `‖T(p_k) − p_k‖∞ ≤ tol`,
/// returning that `p_k`, so the reported vector always carries a residual
/// within tolerance. Divergence is declared when `‖p_k‖∞` exceeds the cap
/// or a growth ray certifies unbounded increase.
pub fn value_iterate(prob: &ProblemData, opts: &SolveOptions) -> Result<SolveReport> {
    opts.check()?;
    require_valid(prob, opts.allow_invalid)?;
    let n = prob.n();
    let mut p = match &opts.warm_start {
        Some(w) if w.len() != n => {
            return Err(Error::Dimension(format!("warm start has length {}, expected {n}", w.len())));
        }
        Some(w) => w.clone(),
        None => vec![0.0; n],
    };

    let mut residual_trace = Vec::new();
    let mut coords = opts.record_trace.then(Vec::new);
    let mut iterations = 0;
    let finish = |status, p, iterations, residual_trace, coords, divergence| SolveReport {
        status,
        p,
        iterations,
        residual_trace,
        divergence,
        per_coordinate_trace: coords,
    };

    while iterations < opts.max_iter {
        if let Some(c) = coords.as_mut() {
            c.push(p.clone());
        }
        let next = apply_impl(prob, &p, true, opts.exec);
        let increment: Vec<f64> = next.iter().zip(&p).map(|(a, b)| a - b).collect();
        let residual = sup_norm(&increment);
        residual_trace.push(residual);
        iterations += 1;

        if residual <= opts.tol {
            return Ok(finish(Status::FixedPoint, p, iterations, residual_trace, coords, None));
        }
        let monotone = increment.iter().all(|&v| v >= -opts.tol);
        if !opts.allow_invalid
            && monotone
            && iterations % RAY_CHECK_INTERVAL == 0
            && growth_ray(prob, &increment, opts.exec)
        {
            return Ok(finish(
                Status::Diverged,
                next,
                iterations,
                residual_trace,
                coords,
                Some(DivergenceWitness::GrowthRay),
            ));
        }
        p = next;
        if !p.iter().all(|v| v.is_finite()) || sup_norm(&p) > opts.divergence_cap {
            return Ok(finish(Status::Diverged, p, iterations, residual_trace, coords, Some(DivergenceWitness::Cap)));
        }
    }
    Ok(finish(Status::MaxIterations, p, iterations, residual_trace, coords, None))
}

/// Solves many independent instances, in parallel when `exec` allows.
pub fn solve_batch(problems: &[ProblemData], opts: &SolveOptions, exec: Execution) -> Vec<Result<SolveReport>> {
    let inner = SolveOptions { exec: Execution::Sequential, ..opts.clone() };
    exec::map_slice(exec, problems, |p| value_iterate(p, &inner))
}
