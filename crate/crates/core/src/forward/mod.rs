//! Direct problem: Jost function, I-function, S-matrix, bound states,
//! norming constants and spectral measure of a given potential.

mod integrator;
pub mod square_well;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    blaschke, check_wronskian, winding_index, BoundStateSet, Grid, GridKind, Potential, SampledComplexFunction,
    ScatteringTriple, SpectralAtom, SpectralMeasure, Symmetry,
};

pub use integrator::StepControl;
use integrator::{breakpoints, propagate, State};
pub use square_well::SquareWell;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy)]
pub struct ForwardOptions {
    pub steps: StepControl,
    /// Number of sample points in the κ sign scan.
    pub scan_points: usize,
    /// Added to √max(0, −min q) to get the scan upper bound.
    pub scan_margin: f64,
    /// Relative tolerance of the norming-constant identity cross-check.
    pub identity_tol: f64,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        ForwardOptions {
            steps: StepControl::default(),
            scan_points: 400,
            scan_margin: 0.5,
            identity_tol: 1e-3,
        }
    }
}

/// Boundary values of the Jost solution on a momentum grid.
#[derive(Debug, Clone)]
pub struct JostBoundaryData {
    pub f: SampledComplexFunction,
    pub fprime0: SampledComplexFunction,
    pub bound: BoundStateSet,
}

/// Per-state quantities used to fill the norming constants.
#[derive(Debug, Clone, Copy)]
pub struct BoundStateDetail {
    pub kappa: f64,
    /// ‖f(·, iκ)‖⁻²
    pub s: f64,
    /// ‖φ(·, iκ)‖⁻²
    pub c: f64,
    /// ḟ(iκ), the k-derivative of f(k) at k = iκ
    pub fdot: Complex64,
    pub fprime0: Complex64,
}

/// (f(0,k), f'(0,k)) by backward integration from the end of the support,
/// starting from the rescaled data u = 1, u' = ik.
pub fn solve_jost(q: &Potential, k: Complex64) -> Result<(Complex64, Complex64)> {
    solve_jost_with(q, k, StepControl::default())
}

pub fn solve_jost_with(q: &Potential, k: Complex64, steps: StepControl) -> Result<(Complex64, Complex64)> {
    if k.im < 0.0 {
        return Err(Error::Precondition(format!("Jost solution needs Im k >= 0 (k = {k})")));
    }
    let end = q.support_end();
    let mut nodes = breakpoints(q, end, &[]);
    nodes.reverse();
    let y0: State = [ONE, I * k, ZERO];
    let states = propagate(q, &nodes, y0, k, steps);
    let last = states[states.len() - 1];
    let scale = (I * k * end).exp();
    let (f, fp) = (last[0] * scale, last[1] * scale);
    if !(f.re.is_finite() && f.im.is_finite() && fp.re.is_finite() && fp.im.is_finite()) {
        return Err(Error::Integrator(format!("non-finite Jost data at k = {k}")));
    }
    Ok((f, fp))
}

/// Samples of φ(x, k) (φ(0) = 0, φ'(0) = 1) at the points of `xgrid`.
pub fn regular_solution(q: &Potential, k: Complex64, xgrid: &Grid) -> Result<Vec<Complex64>> {
    regular_solution_with(q, k, xgrid, StepControl::default())
}

pub fn regular_solution_with(q: &Potential, k: Complex64, xgrid: &Grid, steps: StepControl) -> Result<Vec<Complex64>> {
    let end = xgrid.last().max(q.support_end());
    let nodes = breakpoints(q, end, xgrid.points());
    let states = propagate(q, &nodes, [ZERO, ONE, ZERO], k, steps);
    xgrid
        .points()
        .iter()
        .map(|&x| {
            let i = nodes.partition_point(|&n| n < x - 1e-13 * x.max(1.0));
            let s = states
                .get(i)
                .ok_or_else(|| Error::Integrator(format!("no node at x = {x}")))?;
            if !s[0].re.is_finite() {
                return Err(Error::Integrator(format!("φ overflow at x = {x}")));
            }
            Ok(s[0])
        })
        .collect()
}

/// Bound states κ_j > 0 with f(iκ_j) = 0, located by a sign scan of the
/// real function κ ↦ f(iκ) followed by bisection.
pub fn find_bound_states(q: &Potential) -> Result<BoundStateSet> {
    find_bound_states_with(q, &ForwardOptions::default())
}

pub fn find_bound_states_with(q: &Potential, opts: &ForwardOptions) -> Result<BoundStateSet> {
    let depth = (-q.min_value()).max(0.0);
    if depth == 0.0 {
        return BoundStateSet::new(vec![]);
    }
    let upper = depth.sqrt() + opts.scan_margin;
    let n = opts.scan_points.max(8);
    let fi = |kappa: f64| -> Result<f64> { Ok(solve_jost_with(q, Complex64::new(0.0, kappa), opts.steps)?.0.re) };
    let lower = upper * 1e-4;
    let samples: Vec<f64> = (0..=n).map(|i| lower + (upper - lower) * i as f64 / n as f64).collect();
    let values = samples.par_iter().map(|&k| fi(k)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for i in 0..n {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            roots.push(samples[i]);
            continue;
        }
        if a.signum() != b.signum() && b != 0.0 {
            let (mut lo, mut hi, flo) = (samples[i], samples[i + 1], a);
            while hi - lo > 1e-14 * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                let fm = fi(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    if values[n] == 0.0 {
        roots.push(samples[n]);
    }
    BoundStateSet::new(roots)
}

/// ḟ(iκ) by central differences along the imaginary axis with step
/// h = 1e-4·max(1, κ), Richardson-combined with the half step.
fn fdot_imaginary(q: &Potential, kappa: f64, steps: StepControl) -> Result<Complex64> {
    let fi = |kk: f64| -> Result<f64> { Ok(solve_jost_with(q, Complex64::new(0.0, kk), steps)?.0.re) };
    let diff = |h: f64| -> Result<f64> { Ok((fi(kappa + h)? - fi(kappa - h)?) / (2.0 * h)) };
    let h = 1e-4 * kappa.max(1.0);
    let d1 = diff(h)?;
    let d2 = diff(0.5 * h)?;
    if (d1 - d2).abs() > 1e-4 * d2.abs().max(1e-12) {
        return Err(Error::IdentityMismatch {
            identity: "step-halving of df/dk at ik_j",
            mismatch: (d1 - d2).abs() / d2.abs(),
        });
    }
    // k = iκ ⇒ d/dk = −i d/dκ
    Ok(-I * (4.0 * d2 - d1) / 3.0)
}

/// s_j and c_j by quadrature of |f(·,iκ)|² and |φ(·,iκ)|² with exponential
/// tails, cross-checked against s_j = −2iκ/(ḟ f'(0)) and c_j = −2iκ f'(0)/ḟ.
pub fn bound_state_details(
    q: &Potential,
    bound: &BoundStateSet,
    opts: &ForwardOptions,
) -> Result<Vec<BoundStateDetail>> {
    let end = q.support_end();
    bound
        .kappas()
        .iter()
        .map(|&kappa| {
            let k = Complex64::new(0.0, kappa);
            // Jost solution, backward; ∫ f² accumulates with a minus sign
            let mut nodes = breakpoints(q, end, &[]);
            nodes.reverse();
            let st = propagate(q, &nodes, [ONE, I * k, ZERO], k, opts.steps);
            let last = st[st.len() - 1];
            let scale = (-kappa * end).exp();
            let fprime0 = last[1] * scale;
            let norm_f = -last[2].re * scale * scale + scale * scale / (2.0 * kappa);
            // regular solution, forward; beyond the support φ = φ(X) e^{-κ(x-X)}
            let fwd = breakpoints(q, end, &[]);
            let sp = propagate(q, &fwd, [ZERO, ONE, ZERO], k, opts.steps);
            let tail = sp[sp.len() - 1];
            let norm_phi = tail[2].re + tail[0].re * tail[0].re / (2.0 * kappa);
            let s = 1.0 / norm_f;
            let c = 1.0 / norm_phi;
            let fdot = fdot_imaginary(q, kappa, opts.steps)?;
            let s_id = (-2.0 * I * kappa / (fdot * fprime0)).re;
            let c_id = (-2.0 * I * kappa * fprime0 / fdot).re;
            let mismatch = ((s_id - s) / s).abs().max(((c_id - c) / c).abs());
            if !(mismatch <= opts.identity_tol) {
                return Err(Error::IdentityMismatch {
                    identity: "s_j = -2ik_j/(fdot f'(0)), c_j = -2ik_j f'(0)/fdot",
                    mismatch,
                });
            }
            Ok(BoundStateDetail {
                kappa,
                s,
                c,
                fdot,
                fprime0,
            })
        })
        .collect()
}

/// Fills s_j, c_j and the residues I_j = f'(0,iκ_j)/ḟ(iκ_j).
pub fn norming_constants(q: &Potential, bound: &BoundStateSet) -> Result<BoundStateSet> {
    norming_constants_with(q, bound, &ForwardOptions::default())
}

pub fn norming_constants_with(q: &Potential, bound: &BoundStateSet, opts: &ForwardOptions) -> Result<BoundStateSet> {
    if bound.is_empty() {
        return Ok(bound.clone());
    }
    let details = bound_state_details(q, bound, opts)?;
    let residues = details
        .iter()
        .map(|d| {
            // residue is purely imaginary for real q; drop round-off in Re
            Complex64::new(0.0, (d.fprime0 / d.fdot).im)
        })
        .collect();
    bound
        .clone()
        .with_s(details.iter().map(|d| d.s).collect())?
        .with_c(details.iter().map(|d| d.c).collect())?
        .with_residues(residues)
}

/// Jost boundary data on a momentum grid, with bound states, norming
/// constants and the f(0) = 0 flag (decided by the winding index of
/// S(−k)/w²(k)) attached.
pub fn jost_boundary(q: &Potential, grid: &Grid) -> Result<JostBoundaryData> {
    jost_boundary_with(q, grid, &ForwardOptions::default())
}

pub fn jost_boundary_with(q: &Potential, grid: &Grid, opts: &ForwardOptions) -> Result<JostBoundaryData> {
    if grid.kind() != GridKind::Momentum {
        return Err(Error::Grid("jost_boundary needs a momentum grid".into()));
    }
    let pairs = grid
        .points()
        .par_iter()
        .map(|&k| solve_jost_with(q, Complex64::new(k, 0.0), opts.steps))
        .collect::<Result<Vec<_>>>()?;
    let f = SampledComplexFunction::new(grid.clone(), pairs.iter().map(|p| p.0).collect(), Symmetry::Hermitian)?;
    let fprime0 = SampledComplexFunction::new(grid.clone(), pairs.iter().map(|p| p.1).collect(), Symmetry::Hermitian)?;
    let bound = find_bound_states_with(q, opts)?;
    let bound = norming_constants_with(q, &bound, opts)?;
    let zero_at_origin = origin_index(&f, &bound)? == 1;
    let bound = bound.with_zero_at_origin(zero_at_origin);
    if zero_at_origin {
        // I₀ = −i/ḟ(0)², ḟ(0) from the small-k slope of f
        let k0 = grid.first();
        let fdot0 = f.values()[0] / k0;
        let origin = -I / (fdot0 * fdot0);
        return Ok(JostBoundaryData {
            bound: bound.with_origin_residue(Some(Complex64::new(0.0, origin.im)))?,
            f,
            fprime0,
        });
    }
    Ok(JostBoundaryData { f, fprime0, bound })
}

/// Winding index of S(−k)/w²(k) = f(k)/(conj f(k) w²(k)).
pub fn origin_index(f: &SampledComplexFunction, bound: &BoundStateSet) -> Result<i64> {
    let plain = bound.clone().with_zero_at_origin(false);
    let u = f.map(Symmetry::Hermitian, |k, v| {
        let w = blaschke(Complex64::new(k, 0.0), &plain).expect("real k is never a pole");
        v / (v.conj() * w * w)
    })?;
    winding_index(&u)
}

impl JostBoundaryData {
    pub fn wronskian_residual(&self) -> Result<f64> {
        check_wronskian(&self.f, &self.fprime0)
    }
}

fn ensure_nonzero(f: &SampledComplexFunction) -> Result<()> {
    if let Some(i) = f.values().iter().position(|v| v.norm() < 1e-14) {
        return Err(Error::Precondition(format!(
            "|f(k)| vanishes at grid point k = {}",
            f.points()[i]
        )));
    }
    Ok(())
}

/// I(k) = f'(0,k)/f(k).
pub fn i_function(jb: &JostBoundaryData) -> Result<SampledComplexFunction> {
    ensure_nonzero(&jb.f)?;
    let values: Vec<Complex64> = jb
        .fprime0
        .values()
        .iter()
        .zip(jb.f.values())
        .map(|(a, b)| a / b)
        .collect();
    if let Some(i) = values.iter().position(|v| !(v.im > 0.0)) {
        return Err(Error::invariant(
            "Im I(k) > 0",
            format!("Im I({}) = {}", jb.f.points()[i], values[i].im),
        ));
    }
    SampledComplexFunction::new(jb.f.grid().clone(), values, Symmetry::Hermitian)
}

/// S(k) = conj f(k) / f(k) with the bound states and s_j attached.
pub fn s_matrix(jb: &JostBoundaryData) -> Result<ScatteringTriple> {
    ensure_nonzero(&jb.f)?;
    let s = jb.f.map(Symmetry::Hermitian, |_, v| v.conj() / v)?;
    ScatteringTriple::new(s, jb.bound.clone())
}

/// dρ/dλ = √λ / (π |f(√λ)|²) on λ = k², atoms (−κ_j², c_j).
pub fn spectral_density(jb: &JostBoundaryData) -> Result<SpectralMeasure> {
    ensure_nonzero(&jb.f)?;
    let lambdas: Vec<f64> = jb.f.points().iter().map(|k| k * k).collect();
    let density =
        jb.f.points()
            .iter()
            .zip(jb.f.values())
            .map(|(&k, v)| k / (std::f64::consts::PI * v.norm_sqr()))
            .collect();
    let atoms = match (jb.bound.is_empty(), jb.bound.c()) {
        (true, _) => vec![],
        (false, Some(c)) => jb
            .bound
            .kappas()
            .iter()
            .zip(c)
            .map(|(&k, &c)| SpectralAtom {
                lambda: -k * k,
                mass: c,
            })
            .collect(),
        (false, None) => {
            return Err(Error::Precondition(
                "spectral density needs c_j for every bound state".into(),
            ))
        }
    };
    SpectralMeasure::new(
        Grid::new(GridKind::Spectral, lambdas)?,
        density,
        atoms,
        jb.bound.zero_at_origin(),
    )
}
