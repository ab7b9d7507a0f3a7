use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{
    check_condition, check_position_grid, condition, fredholm_solve, potential_from_trace, solve_rows, trapezoid,
    KernelSolution, Route, SolveReport,
};
use crate::cauchy::quadrature::{fourier_panels, fourier_tail_moments};
use crate::cauchy::windowed_series;
use crate::model::{Grid, KernelKind, Potential, SpectralMeasure, TriangularKernel};
use crate::{Error, Result};

/// L(x_i, x_j) on the position grid square.
#[derive(Debug, Clone)]
pub struct GlInput {
    pub grid: Grid,
    pub matrix: DMatrix<f64>,
    /// sup |L − Lᵀ|.
    pub symmetry_residual: f64,
}

/// L(x,y) = Σ c_j sinh(κ_j x)sinh(κ_j y)/κ_j² + ∫ sin(√λx)sin(√λy)/λ·[ρ′(λ) − √λ/π]dλ.
///
/// With λ = k² the continuum is G(x−y) − G(x+y), G(t) = ∫₀^∞ cos(kt)u(k)dk and
/// u = (ρ′ − k/π)/k. When f(0) = 0, u ~ A/k² at the origin; that part is
/// integrated exactly to Aπ·min(x,y).
pub fn assemble_l(measure: &SpectralMeasure, xgrid: &Grid) -> Result<GlInput> {
    check_position_grid(xgrid)?;
    let kg = measure.momentum_grid();
    let k = kg.points();
    let u: Vec<f64> = k
        .iter()
        .zip(measure.density())
        .map(|(&kk, &d)| (d - kk / std::f64::consts::PI) / kk)
        .collect();
    let (k1, k2) = (k[0] * k[0], k[1] * k[1]);
    let singular = if measure.zero_at_origin() {
        let (a1, a2) = (k1 * u[0], k2 * u[1]);
        a1 - (a2 - a1) * k1 / (k2 - k1)
    } else {
        0.0
    };
    let reg: Vec<Complex64> = k
        .iter()
        .zip(&u)
        .map(|(&kk, &v)| Complex64::new(v - singular / (kk * kk), 0.0))
        .collect();
    let r0 = reg[0].re - (reg[1].re - reg[0].re) * k1 / (k2 - k1);
    let mut nodes = Vec::with_capacity(k.len() + 1);
    nodes.push(0.0);
    nodes.extend_from_slice(k);
    let mut vals = Vec::with_capacity(reg.len() + 1);
    vals.push(Complex64::new(r0, 0.0));
    vals.extend_from_slice(&reg);

    let kmax = kg.last();
    let start = k
        .partition_point(|&v| v < super::marchenko::TAIL_WINDOW_START * kmax)
        .min(k.len() - 4);
    let even = windowed_series(&k[start..], &reg[start..], |v| v.re, 2, 3);

    let n = xgrid.len();
    let h = xgrid.spacing();
    let g: Vec<f64> = (0..2 * n - 1)
        .map(|m| {
            let t = h * m as f64;
            let m = fourier_tail_moments(t, kmax);
            fourier_panels(&nodes, &vals, t).re + even[0] * m[1] + even[1] * m[3] + even[2] * m[5]
        })
        .collect();
    let x = xgrid.points();
    let atoms = measure.atoms();
    let mut matrix = DMatrix::from_fn(n, n, |i, j| {
        let mut v = g[i.abs_diff(j)] - g[i + j] + singular * std::f64::consts::PI * x[i].min(x[j]);
        for a in atoms {
            let kappa = (-a.lambda).sqrt();
            v += a.mass * (kappa * x[i]).sinh() * (kappa * x[j]).sinh() / (kappa * kappa);
        }
        v
    });
    let symmetry_residual = (&matrix - matrix.transpose()).amax();
    matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(GlInput {
        grid: xgrid.clone(),
        matrix,
        symmetry_residual,
    })
}

/// Row K(x_i, x_j), j ≤ i, from K(x,y) + L(x,y) + ∫₀ˣ K(x,s)L(s,y)ds = 0.
pub fn solve_gl_row(l: &GlInput, i: usize) -> Result<(Vec<f64>, f64)> {
    let w = trapezoid(i + 1, l.grid.spacing());
    let b: Vec<f64> = (0..=i).map(|j| l.matrix[(i, j)]).collect();
    fredholm_solve(i + 1, |j, m| l.matrix[(m, j)], &w, &b)
}

/// The full kernel K on the grid of `l`.
pub fn solve_gl(l: &GlInput) -> Result<KernelSolution> {
    let n = l.grid.len();
    if l.matrix.nrows() != n || l.matrix.ncols() != n {
        return Err(Error::GridMismatch("L does not match its grid".into()));
    }
    let w = trapezoid(n, l.grid.spacing());
    let cond = condition(n, |j, m| l.matrix[(m, j)], &w);
    check_condition(cond, "Gelfand–Levitan system at x = X_max")?;
    let (rows, residual) = solve_rows(n, |i| solve_gl_row(l, i))?;
    let kernel = TriangularKernel::new(l.grid.clone(), rows, KernelKind::K)?;
    let corner = kernel.at(n - 1, n - 1);
    Ok(KernelSolution {
        kernel,
        report: SolveReport {
            route: Route::Gl,
            residual,
            condition: cond,
            corner,
        },
    })
}

/// q = 2 dK(x,x)/dx.
pub fn potential_from_k(k: &TriangularKernel, smooth: bool) -> Result<Potential> {
    if k.kind() != KernelKind::K {
        return Err(Error::Precondition("expected a Gelfand–Levitan kernel".into()));
    }
    potential_from_trace(k, 2.0, smooth)
}
