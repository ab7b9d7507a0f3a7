//! Potential recovery: the Marchenko chain 𝒮 ⇒ F ⇒ A ⇒ q and the
//! Gelfand–Levitan chain ρ ⇒ L ⇒ K ⇒ q, both discretized by trapezoid
//! collocation with one dense solve per x.

mod gl;
mod marchenko;


use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forward::regular_solution;
use crate::model::{Grid, GridKind, KernelKind, Potential, ScatteringTriple, SpectralMeasure, TriangularKernel};
use crate::{Error, Result};

pub use gl::{assemble_l, potential_from_k, solve_gl, solve_gl_row, GlInput};
pub use marchenko::{assemble_f, potential_from_a, solve_marchenko, solve_marchenko_row, MarchenkoInput};

/// Condition estimates above this abort the solve.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Default position grid: X_max = 5, 401 points.
pub const DEFAULT_X_MAX: f64 = 5.0;
pub const DEFAULT_N_X: usize = 401;

pub fn default_position_grid() -> Grid {
    Grid::uniform(GridKind::Position, 0.0, DEFAULT_X_MAX, DEFAULT_N_X).expect("default grid is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Marchenko,
    Gl,
}

/// Solver diagnostics for one kernel.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub route: Route,
    /// Largest relative residual of the discretized equation over all x.
    pub residual: f64,
    /// 2-norm condition number of the largest system.
    pub condition: f64,
    /// A(0,0) for the Marchenko route, K(x_max, x_max) for Gelfand–Levitan.
    pub corner: f64,
}

/// A kernel with its solver report.
#[derive(Debug, Clone)]
pub struct KernelSolution {
    pub kernel: TriangularKernel,
    pub report: SolveReport,
}

/// Recovered potential with the kernel and the points where q̂ jumps.
#[derive(Debug, Clone)]
pub struct PotentialReconstruction {
    pub potential: Potential,
    pub kernel: KernelSolution,
    pub discontinuities: Vec<f64>,
}

pub(crate) fn check_position_grid(x: &Grid) -> Result<()> {
    if x.kind() != GridKind::Position {
        return Err(Error::Grid("reconstruction needs a position grid".into()));
    }
    if x.first() != 0.0 || !x.is_uniform() || x.len() < 5 {
        return Err(Error::Grid(
            "reconstruction needs a uniform grid from x = 0 with at least 5 points".into(),
        ));
    }
    Ok(())
}

pub(crate) fn trapezoid(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n == 1 {
        w[0] = 0.0;
    } else {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Solves (I + K W) u = −b with K[j][m] = kernel(j, m); returns u and the
/// relative residual.
pub(crate) fn fredholm_solve(
    n: usize,
    kernel: impl Fn(usize, usize) -> f64,
    w: &[f64],
    b: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let m = system_matrix(n, &kernel, w);
    let rhs = DVector::from_iterator(n, b.iter().map(|v| -v));
    let u = m.clone().lu().solve(&rhs).ok_or_else(|| Error::Conditioning {
        estimate: f64::INFINITY,
        context: "singular Fredholm system".into(),
    })?;
    let r = &m * &u - &rhs;
    let scale = m.amax() * u.amax() + rhs.amax();
    let residual = if scale > 0.0 { r.amax() / scale } else { 0.0 };
    Ok((u.iter().copied().collect(), residual))
}

fn system_matrix(n: usize, kernel: &impl Fn(usize, usize) -> f64, w: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |j, m| kernel(j, m) * w[m] + if j == m { 1.0 } else { 0.0 })
}

pub(crate) fn condition(n: usize, kernel: impl Fn(usize, usize) -> f64, w: &[f64]) -> f64 {
    let sv = system_matrix(n, &kernel, w).singular_values();
    let (hi, lo) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(h, l), &s| (h.max(s), l.min(s)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

pub(crate) fn check_condition(estimate: f64, context: &str) -> Result<()> {
    if !(estimate <= CONDITION_LIMIT) {
        return Err(Error::Conditioning {
            estimate,
            context: context.into(),
        });
    }
    Ok(())
}

/// Rows solved in parallel; returns the rows and the largest residual.
pub(crate) fn solve_rows(
    n: usize,
    row: impl Fn(usize) -> Result<(Vec<f64>, f64)> + Sync,
) -> Result<(Vec<Vec<f64>>, f64)> {
    let solved: Vec<(Vec<f64>, f64)> = (0..n).into_par_iter().map(&row).collect::<Result<_>>()?;
    let residual = solved.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok((solved.into_iter().map(|s| s.0).collect(), residual))
}

/// First derivative on a uniform grid: 4th-order central differences,
/// 4th-order one-sided stencils at the two cells next to each end.
pub fn differentiate(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n >= 5, "need at least 5 samples");
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                -25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]
            } else if i == 1 {
                -3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]
            } else if i == n - 2 {
                3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]
            } else if i == n - 1 {
                25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]
            } else {
                -v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]
            };
            d / (12.0 * h)
        })
        .collect()
}

/// 3-point moving average, ends kept.
pub fn smooth3(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                v[i]
            } else {
                (v[i - 1] + v[i] + v[i + 1]) / 3.0
            }
        })
        .collect()
}

/// Centres of runs of cells where q̂ changes by more than a quarter of its range.
pub fn find_jumps(q: &Potential) -> Vec<f64> {
    let v = q.values();
    let range = v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min);
    if !(range > 0.0) {
        return Vec::new();
    }
    let x = q.grid().points();
    let steep: Vec<usize> = (0..v.len() - 1)
        .filter(|&i| (v[i + 1] - v[i]).abs() > 0.25 * range)
        .collect();
    let mut jumps = Vec::new();
    let mut run_start = 0;
    for n in 0..steep.len() {
        if n + 1 == steep.len() || steep[n + 1] != steep[n] + 1 {
            jumps.push(0.5 * (x[steep[run_start]] + x[steep[n] + 1]));
            run_start = n + 1;
        }
    }
    jumps
}

pub(crate) fn potential_from_trace(kernel: &TriangularKernel, factor: f64, smooth: bool) -> Result<Potential> {
    let grid = kernel.grid().clone();
    let mut q: Vec<f64> = differentiate(&kernel.diagonal(), grid.spacing())
        .into_iter()
        .map(|d| factor * d)
        .collect();
    if smooth {
        q = smooth3(&q);
    }
    let end = grid.last();
    Potential::new(grid, q, end)
}

/// sup over the kernel grid of |φ̂ − φ| with φ̂ = φ₀ + ∫₀ˣ K(x,s)φ₀(s)ds,
/// φ₀ = sin(kx)/k and φ the regular solution of q.
pub fn transform_check(kernel: &TriangularKernel, q: &Potential, k: f64) -> Result<f64> {
    if kernel.kind() != KernelKind::K {
        return Err(Error::Precondition(
            "transform check needs a Gelfand–Levitan kernel".into(),
        ));
    }
    if !(k > 0.0) {
        return Err(Error::Precondition(format!("k must be positive, got {k}")));
    }
    let grid = kernel.grid();
    let x = grid.points();
    let h = grid.spacing();
    let phi0: Vec<f64> = x.iter().map(|&s| (k * s).sin() / k).collect();
    let phi = regular_solution(q, Complex64::new(k, 0.0), grid)?;
    Ok((0..x.len())
        .map(|i| {
            let w = trapezoid(i + 1, h);
            let integral: f64 = (0..=i).map(|m| w[m] * kernel.at(i, m) * phi0[m]).sum();
            (phi0[i] + integral - phi[i].re).abs()
        })
        .fold(0.0, f64::max))
}

/// 𝒮 ⇒ F ⇒ A ⇒ q on `xgrid`.
pub fn reconstruct_marchenko(triple: &ScatteringTriple, xgrid: &Grid, smooth: bool) -> Result<PotentialReconstruction> {
    let f = assemble_f(triple, xgrid)?;
    let kernel = solve_marchenko(&f, xgrid)?;
    let potential = potential_from_a(&kernel.kernel, smooth)?;
    let discontinuities = find_jumps(&potential);
    Ok(PotentialReconstruction {
        potential,
        kernel,
        discontinuities,
    })
}

/// ρ ⇒ L ⇒ K ⇒ q on `xgrid`.
pub fn reconstruct_gl(measure: &SpectralMeasure, xgrid: &Grid, smooth: bool) -> Result<PotentialReconstruction> {
    let l = assemble_l(measure, xgrid)?;
    let kernel = solve_gl(&l)?;
    let potential = potential_from_k(&kernel.kernel, smooth)?;
    let discontinuities = find_jumps(&potential);
    Ok(PotentialReconstruction {
        potential,
        kernel,
        discontinuities,
    })
}
