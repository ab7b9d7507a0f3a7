use num_complex::Complex64;

use super::{
    check_condition, check_position_grid, condition, fredholm_solve, potential_from_trace, solve_rows, trapezoid,
    KernelSolution, Route, SolveReport,
};
use crate::cauchy::quadrature::{fourier_panels, fourier_tail_moments};
use crate::cauchy::windowed_series;
use crate::model::{Grid, KernelKind, Potential, ScatteringTriple, TriangularKernel};
use crate::{Error, Result};

/// Fits of the large-k tail start at this fraction of K_max.
pub(crate) const TAIL_WINDOW_START: f64 = 0.25;

/// F(t) on t = 0, Δx, …, 2·X_max.
#[derive(Debug, Clone)]
pub struct MarchenkoInput {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// 1 − S ≈ Σ c_n·(i/kⁿ for odd n, 1/kⁿ for even n) beyond K_max, n = 1..6.
    pub tail: [f64; 6],
}

impl MarchenkoInput {
    /// F at grid index m of the doubled grid.
    pub fn at(&self, m: usize) -> f64 {
        self.values[m]
    }
}

/// F(t) = Σ s_j e^{−κ_j t} + (1/2π)∫(1 − S(k))e^{ikt}dk.
pub fn assemble_f(triple: &ScatteringTriple, xgrid: &Grid) -> Result<MarchenkoInput> {
    check_position_grid(xgrid)?;
    let bound = triple.bound();
    let s = match (bound.is_empty(), bound.s()) {
        (true, _) => Vec::new(),
        (false, Some(s)) => s.to_vec(),
        (false, None) => {
            return Err(Error::Precondition(
                "Marchenko input needs the norming constants s_j".into(),
            ))
        }
    };
    let sm = triple.s_matrix();
    let k = sm.points();
    let r: Vec<Complex64> = sm.values().iter().map(|v| 1.0 - v).collect();
    let (k1, k2) = (k[0] * k[0], k[1] * k[1]);
    let r0 = r[0].re - (r[1].re - r[0].re) * k1 / (k2 - k1);
    let mut nodes = Vec::with_capacity(k.len() + 1);
    nodes.push(0.0);
    nodes.extend_from_slice(k);
    let mut vals = Vec::with_capacity(r.len() + 1);
    vals.push(Complex64::new(r0, 0.0));
    vals.extend_from_slice(&r);

    let kmax = sm.grid().last();
    let start = k.partition_point(|&v| v < TAIL_WINDOW_START * kmax).min(k.len() - 4);
    let odd = windowed_series(&k[start..], &r[start..], |v| v.im, 1, 3);
    let even = windowed_series(&k[start..], &r[start..], |v| v.re, 2, 3);
    let tail = [odd[0], even[0], odd[1], even[1], odd[2], even[2]];

    let h = xgrid.spacing();
    let n = 2 * (xgrid.len() - 1) + 1;
    let tgrid = Grid::uniform(crate::model::GridKind::Position, 0.0, h * (n - 1) as f64, n)?;
    let values = tgrid
        .points()
        .iter()
        .map(|&t| {
            let data = fourier_panels(&nodes, &vals, t).re;
            let m = fourier_tail_moments(t, kmax);
            // Re[(i c/kⁿ)e^{ikt}] = −c sin(kt)/kⁿ, Re[(c/kⁿ)e^{ikt}] = c cos(kt)/kⁿ
            let tail_part: f64 = (0..6)
                .map(|n| if n % 2 == 0 { -tail[n] * m[n] } else { tail[n] * m[n] })
                .sum();
            let poles: f64 = bound
                .kappas()
                .iter()
                .zip(&s)
                .map(|(&kappa, &sj)| sj * (-kappa * t).exp())
                .sum();
            poles + (data + tail_part) / std::f64::consts::PI
        })
        .collect();
    Ok(MarchenkoInput {
        grid: tgrid,
        values,
        tail,
    })
}

fn row_system(f: &MarchenkoInput, n: usize, i: usize, h: f64) -> (usize, Vec<f64>, Vec<f64>) {
    let len = n - i;
    let w = trapezoid(len, h);
    let b = (0..len).map(|j| f.at(2 * i + j)).collect();
    (len, w, b)
}

/// Row A(x_i, x_j), j ≥ i, from A(x,y) + F(x+y) + ∫ₓ^∞ A(x,s)F(s+y)ds = 0.
pub fn solve_marchenko_row(f: &MarchenkoInput, xgrid: &Grid, i: usize) -> Result<(Vec<f64>, f64)> {
    let n = xgrid.len();
    let (len, w, b) = row_system(f, n, i, xgrid.spacing());
    fredholm_solve(len, |j, m| f.at(2 * i + j + m), &w, &b)
}

/// The full kernel A on `xgrid`.
pub fn solve_marchenko(f: &MarchenkoInput, xgrid: &Grid) -> Result<KernelSolution> {
    check_position_grid(xgrid)?;
    let n = xgrid.len();
    if f.values.len() < 2 * n - 1 {
        return Err(Error::GridMismatch("F does not cover [0, 2·X_max]".into()));
    }
    let (len, w, _) = row_system(f, n, 0, xgrid.spacing());
    let cond = condition(len, |j, m| f.at(j + m), &w);
    check_condition(cond, "Marchenko system at x = 0")?;
    let (rows, residual) = solve_rows(n, |i| solve_marchenko_row(f, xgrid, i))?;
    let kernel = TriangularKernel::new(xgrid.clone(), rows, KernelKind::A)?;
    let corner = kernel.at(0, 0);
    Ok(KernelSolution {
        kernel,
        report: SolveReport {
            route: Route::Marchenko,
            residual,
            condition: cond,
            corner,
        },
    })
}

/// q = −2 dA(x,x)/dx.
pub fn potential_from_a(a: &TriangularKernel, smooth: bool) -> Result<Potential> {
    if a.kind() != KernelKind::A {
        return Err(Error::Precondition("expected a Marchenko kernel".into()));
    }
    potential_from_trace(a, -2.0, smooth)
}
