//! Output-maximizing split of one trade across independent paths.
//!
//! Maximize `Σ g_i(x_i)` subject to `Σ x_i = X`, `x_i ≥ 0`, each `g_i` an
//! effective pool. At the optimum every funded path has the same marginal
//! rate `λ*` and every unfunded path has `g_i'(0) ≤ λ*`. For this family the
//! funded inputs are `x_i = (sqrt(a_i·b_i/λ) − b_i)/c_i`, so for a fixed active
//! set `S`:
//!
//! ```text
//! sqrt(1/λ) = (X + Σ_S b_i/c_i) / Σ_S sqrt(a_i·b_i)/c_i
//! ```
//!
//! Paths are activated in decreasing order of `g_i'(0)` until the next one
//! would not be funded at the resulting `λ`.

use serde::{Deserialize, Serialize};

use super::RouteError;
use crate::effective::EffectivePool;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutePlan {
    /// Input routed through each path, in the order the paths were given.
    pub inputs: Vec<f64>,
    pub total_input: f64,
    pub total_output: f64,
    pub lambda_star: f64,
}

impl RoutePlan {
    /// Largest relative deviation of a funded path's marginal from `λ*`, and
    /// of an unfunded path's initial marginal above `λ*` (zero when none).
    pub fn kkt_residual(&self, paths: &[EffectivePool]) -> f64 {
        let mut worst: f64 = 0.0;
        for (g, &x) in paths.iter().zip(&self.inputs) {
            if x > 0.0 {
                worst = worst.max((g.marginal(x) - self.lambda_star).abs() / self.lambda_star);
            } else {
                worst = worst.max((g.marginal_at_zero() - self.lambda_star) / self.lambda_star);
            }
        }
        worst
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

pub fn optimal_split(paths: &[EffectivePool], total_input: f64) -> Result<RoutePlan, RouteError> {
    if paths.is_empty() {
        return Err(RouteError::EmptyPathSet);
    }
    if !(total_input.is_finite() && total_input > 0.0) {
        return Err(RouteError::Domain(format!("total input {total_input} must be positive")));
    }
    let (in0, out0) = (&paths[0].in_token.symbol, &paths[0].out_token.symbol);
    if paths.iter().any(|p| &p.in_token.symbol != in0 || &p.out_token.symbol != out0) {
        return Err(RouteError::Domain("paths do not share input and output tokens".into()));
    }

    let plan = water_fill(paths, total_input).filter(|p| sum_ok(&p.inputs, total_input));
    let plan = match plan {
        Some(p) => p,
        None => bisect(paths, total_input),
    };
    Ok(plan)
}

fn sum_ok(inputs: &[f64], total: f64) -> bool {
    let s: f64 = inputs.iter().sum();
    inputs.iter().all(|x| x.is_finite() && *x >= 0.0) && ((s - total).abs() <= SUM_TOLERANCE * total)
}

fn finish(paths: &[EffectivePool], mut inputs: Vec<f64>, total_input: f64, lambda: f64) -> RoutePlan {
    // Absorb floating residue into the largest allocation.
    let s: f64 = inputs.iter().sum();
    if let Some((i, _)) = inputs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        inputs[i] = (inputs[i] + (total_input - s)).max(0.0);
    }
    let total_output = paths.iter().zip(&inputs).map(|(g, &x)| g.eval(x)).sum();
    RoutePlan { inputs, total_input, total_output, lambda_star: lambda }
}

fn water_fill(paths: &[EffectivePool], total_input: f64) -> Option<RoutePlan> {
    let mut order: Vec<usize> = (0..paths.len()).collect();
    // Stable sort keeps caller order (lexicographic pool ids) among ties.
    order.sort_by(|&i, &j| paths[j].marginal_at_zero().total_cmp(&paths[i].marginal_at_zero()));

    let mut sum_b_over_c = 0.0;
    let mut sum_root_over_c = 0.0;
    let mut lambda = f64::NAN;
    let mut active = 0;
    for (k, &i) in order.iter().enumerate() {
        let g = &paths[i];
        if k > 0 && g.marginal_at_zero() <= lambda {
            break;
        }
        sum_b_over_c += g.b() / g.c();
        sum_root_over_c += g.a().sqrt() * g.b().sqrt() / g.c();
        let inv_sqrt = (total_input + sum_b_over_c) / sum_root_over_c;
        lambda = 1.0 / (inv_sqrt * inv_sqrt);
        active = k + 1;
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return None;
    }
    let mut inputs = vec![0.0; paths.len()];
    for &i in &order[..active] {
        inputs[i] = paths[i].inverse_marginal_unchecked(lambda);
    }
    if !sum_ok(&inputs, total_input) {
        return None;
    }
    Some(finish(paths, inputs, total_input, lambda))
}

/// Fallback: bisection on `λ` until `Σ x_i(λ) = X`.
fn bisect(paths: &[EffectivePool], total_input: f64) -> RoutePlan {
    let allocate = |lambda: f64| -> Vec<f64> {
        paths
            .iter()
            .map(|g| if g.marginal_at_zero() > lambda { g.inverse_marginal_unchecked(lambda) } else { 0.0 })
            .collect()
    };
    let sum = |lambda: f64| allocate(lambda).iter().sum::<f64>();
    let mut hi = paths.iter().map(|g| g.marginal_at_zero()).fold(0.0, f64::max);
    let mut lo = hi / 2.0;
    while sum(lo) < total_input && lo > f64::MIN_POSITIVE {
        hi = lo;
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) >= total_input {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    finish(paths, allocate(lo), total_input, lo)
}

/// Paths carrying at least `threshold` of the total input.
pub fn count_used_paths(plan: &RoutePlan, threshold: f64) -> usize {
    plan.inputs.iter().filter(|&&x| x > 0.0 && x >= threshold * plan.total_input).count()
}
