use num_complex::Complex64;
use serde::Serialize;

use super::eigen::eigenvalues_small;
use crate::error::{Error, Result};
use crate::ode::{State, VectorField};
use crate::systems::SystemSpec;

const MAX_NEWTON_ITERATIONS: usize = 50;
const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Accepted when Newton stalls at rounding level.
const STALLED_RESIDUAL_TOLERANCE: f64 = 1e-10;
const MERGE_DISTANCE: f64 = 1e-8;
const HYPERBOLIC_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    NonHyperbolic,
}

impl Stability {
    pub fn classify(eigenvalues: &[Complex64]) -> Self {
        if eigenvalues.iter().any(|e| e.re.abs() <= HYPERBOLIC_MARGIN) {
            Stability::NonHyperbolic
        } else if eigenvalues.iter().all(|e| e.re < 0.0) {
            Stability::Stable
        } else if eigenvalues.iter().all(|e| e.re > 0.0) {
            Stability::Unstable
        } else {
            Stability::Saddle
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Stability,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EquilibriumSearch {
    pub equilibria: Vec<Equilibrium>,
    /// One entry per seed that did not converge.
    pub diagnostics: Vec<String>,
}

/// Newton seeds per system: a 3x3 grid over [-3, 3]^2 for Van der Pol, five
/// points on the line x2 = 0.7 x1, x3 = 0 with x1 in [-2, 0.5] for Chua, and
/// the origin plus (+-9, +-9, 27) for Lorenz.
pub fn default_seeds(spec: &SystemSpec) -> Vec<Vec<f64>> {
    seed_grid(spec, 1)
}

/// Seed set at `level` times the default density (level 1 is the default).
pub fn seed_grid(spec: &SystemSpec, level: usize) -> Vec<Vec<f64>> {
    let level = level.max(1);
    let line = |lo: f64, hi: f64, count: usize| -> Vec<f64> {
        (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect()
    };
    match spec {
        SystemSpec::VanDerPol(_) => {
            let axis = line(-3.0, 3.0, 2 * level + 1);
            axis.iter()
                .flat_map(|&a| axis.iter().map(move |&b| vec![a, b]))
                .collect()
        }
        SystemSpec::Chua(_) => line(-2.0, 0.5, 4 * level + 1)
            .into_iter()
            .map(|x1| vec![x1, 0.7 * x1, 0.0])
            .collect(),
        SystemSpec::Lorenz(_) => {
            let mut seeds = vec![vec![0.0, 0.0, 0.0]];
            for k in 1..=level {
                let f = k as f64 / level as f64;
                seeds.push(vec![9.0 * f, 9.0 * f, 27.0 * f]);
                seeds.push(vec![-9.0 * f, -9.0 * f, 27.0 * f]);
            }
            seeds
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None` if
/// the matrix is numerically singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn residual(spec: &SystemSpec, x: &[f64]) -> f64 {
    let mut f = vec![0.0; x.len()];
    spec.eval(0.0, x, &mut f);
    norm(&f)
}

fn newton(spec: &SystemSpec, seed: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let mut x = seed.to_vec();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = spec.eval_rhs(&State::new(0.0, x.clone())).map_err(|e| e.to_string())?;
        if norm(&f) < RESIDUAL_TOLERANCE {
            return Ok(x);
        }
        let jac = spec.eval_jacobian(&x).map_err(|e| e.to_string())?;
        let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let dx = solve(jac, neg_f).ok_or_else(|| format!("singular Jacobian at {x:?}"))?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err("Newton iterate diverged".into());
        }
        if norm(&dx) <= 4.0 * f64::EPSILON * (1.0 + norm(&x))
            && residual(spec, &x) < STALLED_RESIDUAL_TOLERANCE
        {
            return Ok(x);
        }
    }
    if residual(spec, &x) < RESIDUAL_TOLERANCE {
        Ok(x)
    } else {
        Err(format!(
            "no convergence in {MAX_NEWTON_ITERATIONS} iterations (residual {:e})",
            residual(spec, &x)
        ))
    }
}

/// Runs Newton's method from every seed, merges duplicates and annotates
/// each equilibrium with its eigenvalues. Seeds that fail are reported in
/// [`EquilibriumSearch::diagnostics`] and skipped.
pub fn find_equilibria(spec: &SystemSpec, seeds: &[Vec<f64>]) -> Result<EquilibriumSearch> {
    let n = spec.dimension();
    let mut out = EquilibriumSearch::default();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        if seed.len() != n || seed.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "seed {seed:?} must be a finite vector of dimension {n}"
            )));
        }
        match newton(spec, seed) {
            Ok(x) => {
                let duplicate = points.iter().any(|p| {
                    p.iter()
                        .zip(&x)
                        .all(|(a, b)| (a - b).abs() <= MERGE_DISTANCE)
                });
                if !duplicate {
                    points.push(x);
                }
            }
            Err(msg) => out.diagnostics.push(format!("seed {seed:?}: {msg}")),
        }
    }
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for x in points {
        let eigenvalues = eigenvalues_small(&spec.eval_jacobian(&x)?)?;
        out.equilibria.push(Equilibrium {
            residual_norm: residual(spec, &x),
            classification: Stability::classify(&eigenvalues),
            eigenvalues,
            x,
        });
    }
    Ok(out)
}
