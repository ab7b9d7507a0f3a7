//! From the I-function to bound states, the Jost function, S and ρ.
//!
//! Poles of I in the upper half-plane are read off the exponential content
//! of its Fourier transform; f then follows from |f|² = k/Im I by a Cauchy
//! integral of ln g, and S and ρ follow from f pointwise.

mod fit;
mod signal;

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{HalfLine, TailModel};
use crate::model::{
    blaschke, winding_index, BoundStateSet, Grid, GridKind, SampledComplexFunction, ScatteringTriple, SpectralAtom,
    SpectralMeasure, Symmetry,
};
use crate::{Error, Result};

pub use fit::{ExponentialTerm, FitOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Result of the pole search on I.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleDetectionReport {
    /// Number J of bound states.
    pub count: usize,
    /// κ_j, descending.
    pub kappas: Vec<f64>,
    /// Residues I_j of I at iκ_j.
    pub residues: Vec<Complex64>,
    pub zero_at_origin: bool,
    /// Residue I₀ at k = 0 when `zero_at_origin`.
    pub origin_residue: Option<Complex64>,
    /// RMS misfit of the exponential model on the t-window.
    pub fit_residual: f64,
    /// Exponential terms as fitted, before classification.
    pub terms: Vec<ExponentialTerm>,
}

impl PoleDetectionReport {
    /// The bound-state set carried by the report, residues attached.
    pub fn bound_states(&self) -> Result<BoundStateSet> {
        let set = BoundStateSet::new(self.kappas.clone())?.with_zero_at_origin(self.zero_at_origin);
        let set = if self.count > 0 {
            set.with_residues(self.residues.clone())?
        } else {
            set
        };
        set.with_origin_residue(self.origin_residue)
    }
}

fn check_i(ifun: &SampledComplexFunction) -> Result<()> {
    if ifun.symmetry() != Symmetry::Hermitian {
        return Err(Error::Precondition("I must be hermitian".into()));
    }
    if ifun.grid().kind() != GridKind::Momentum {
        return Err(Error::Grid("I must live on a momentum grid".into()));
    }
    if ifun.grid().len() < 8 {
        return Err(Error::Grid("I needs at least 8 samples".into()));
    }
    for (&k, v) in ifun.points().iter().zip(ifun.values()) {
        if !(v.im > 0.0) || !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::invariant("Im I(k) > 0", format!("I({k}) = {v}")));
        }
    }
    Ok(())
}

/// Pole search with the default fitting options.
pub fn detect_poles(ifun: &SampledComplexFunction) -> Result<PoleDetectionReport> {
    detect_poles_with(ifun, &FitOptions::default())
}

pub fn detect_poles_with(ifun: &SampledComplexFunction, opts: &FitOptions) -> Result<PoleDetectionReport> {
    check_i(ifun)?;
    let sig = signal::PoleSignal::new(ifun, true);
    let times = opts.times();
    let y = sig.sample(&times);
    let (terms, fit_residual) = fit::fit_exponentials(&times, &y, opts)?;

    let mut poles: Vec<(f64, f64)> = Vec::new();
    let mut constant = None;
    for t in &terms {
        if t.kappa < opts.origin_kappa {
            constant = Some(t.amplitude);
        } else {
            poles.push((t.kappa, t.amplitude));
        }
    }
    for &(kappa, amp) in &poles {
        if amp <= 0.0 {
            return Err(Error::invariant(
                "Im I_j > 0",
                format!("fitted pole at κ = {kappa} has residue i·{amp}"),
            ));
        }
    }
    poles.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));

    let by_fit = constant.is_some();
    let by_small_k = small_k_zero(ifun);
    if by_fit != by_small_k {
        return Err(Error::invariant(
            "zero at origin",
            format!("constant term of the pole fit says {by_fit}, small-k behaviour of k/Im I says {by_small_k}"),
        ));
    }
    let origin_residue = constant.map(|c| {
        // the constant is Im I₀ / 2
        Complex64::new(0.0, 2.0 * c)
    });
    Ok(PoleDetectionReport {
        count: poles.len(),
        kappas: poles.iter().map(|p| p.0).collect(),
        residues: poles.iter().map(|p| Complex64::new(0.0, p.1)).collect(),
        zero_at_origin: by_fit,
        origin_residue,
        fit_residual,
        terms,
    })
}

/// f(0) = 0 makes g = k/Im I vanish like k²; otherwise g(0) > 0.
fn small_k_zero(ifun: &SampledComplexFunction) -> bool {
    let pts = ifun.points();
    let vs = ifun.values();
    let g = |i: usize| pts[i] / vs[i].im;
    let ratio = g(0) / g(1);
    let quadratic = (pts[0] / pts[1]).powi(2);
    ratio < 0.5 * (1.0 + quadratic)
}

/// |f(k)| = (k/Im I(k))^{1/2}.
pub fn modulus_f_from_i(ifun: &SampledComplexFunction) -> Result<Vec<f64>> {
    check_i(ifun)?;
    Ok(ifun
        .points()
        .iter()
        .zip(ifun.values())
        .map(|(&k, v)| (k / v.im).sqrt())
        .collect())
}

/// f(z) = exp(C(z))·w(z), C a Cauchy integral of boundary data.
#[derive(Debug, Clone)]
pub struct JostRepresentation {
    grid: Grid,
    half: HalfLine,
    bound: BoundStateSet,
}

impl JostRepresentation {
    pub(crate) fn new(grid: Grid, half: HalfLine, bound: BoundStateSet) -> Self {
        JostRepresentation { grid, half, bound }
    }

    /// f(z) for Im z > 0.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::Precondition(format!("f(z) needs Im z > 0, got {z}")));
        }
        Ok(self.half.eval(z).exp() * blaschke(z, &self.bound)?)
    }

    /// Boundary values f(k + i0) on the grid.
    pub fn boundary(&self) -> Result<SampledComplexFunction> {
        let c = self.half.boundary_all();
        let vals = self
            .grid
            .points()
            .iter()
            .zip(c)
            .map(|(&k, c)| Ok(c.exp() * blaschke(Complex64::new(k, 0.0), &self.bound)?))
            .collect::<Result<Vec<_>>>()?;
        SampledComplexFunction::new(self.grid.clone(), vals, Symmetry::Hermitian)
    }

    pub fn bound(&self) -> &BoundStateSet {
        &self.bound
    }

    /// ḟ(0) for f(0) = 0 from f(ih), f(2ih), h = 10⁻³: (4f(ih) − f(2ih))/(2ih).
    pub fn fdot_origin(&self) -> Result<Complex64> {
        let h = 1e-3;
        let f1 = self.eval(Complex64::new(0.0, h))?;
        let f2 = self.eval(Complex64::new(0.0, 2.0 * h))?;
        Ok((f1 * 4.0 - f2) / (I * (2.0 * h)))
    }

    /// ḟ(iκ) by central differences along the imaginary axis, step 10⁻⁴·max(1, κ)
    /// verified against the halved step.
    pub fn fdot_imaginary(&self, kappa: f64) -> Result<Complex64> {
        let diff = |h: f64| -> Result<Complex64> {
            let up = self.eval(Complex64::new(0.0, kappa + h))?;
            let down = self.eval(Complex64::new(0.0, kappa - h))?;
            Ok((up - down) / (I * (2.0 * h)))
        };
        let h = 1e-4 * kappa.max(1.0);
        let d1 = diff(h)?;
        let d2 = diff(0.5 * h)?;
        let mismatch = (d1 - d2).norm() / d2.norm().max(1e-300);
        if mismatch > 1e-4 {
            return Err(Error::IdentityMismatch {
                identity: "step-halving of df/dk at ik_j",
                mismatch,
            });
        }
        Ok((d2 * 4.0 - d1) / 3.0)
    }
}

/// f from |f|² = g on the grid and the zeros in the upper half-plane.
/// With f(0) = 0 flagged, ln g is replaced by ln(g(s²+1)/s²) and w by w₁.
pub(crate) fn representation_from_modulus(grid: &Grid, g: &[f64], bound: BoundStateSet) -> Result<JostRepresentation> {
    if let Some(i) = g.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invariant(
            "|f|² > 0",
            format!("|f({})|² = {}", grid.points()[i], g[i]),
        ));
    }
    let zero = bound.zero_at_origin();
    let vals = grid
        .points()
        .iter()
        .zip(g)
        .map(|(&k, &g)| {
            let g = if zero { g * (k * k + 1.0) / (k * k) } else { g };
            Complex64::new(g.ln(), 0.0)
        })
        .collect();
    let h = SampledComplexFunction::new(grid.clone(), vals, Symmetry::Hermitian)?;
    let half = HalfLine::new(&h, TailModel::Fitted)?;
    Ok(JostRepresentation::new(grid.clone(), half, bound))
}

/// The representation of f built from I and the detected poles, g = k/Im I.
pub fn jost_representation_from_i(
    ifun: &SampledComplexFunction,
    report: &PoleDetectionReport,
) -> Result<JostRepresentation> {
    check_i(ifun)?;
    let g: Vec<f64> = ifun
        .points()
        .iter()
        .zip(ifun.values())
        .map(|(&k, v)| k / v.im)
        .collect();
    representation_from_modulus(ifun.grid(), &g, report.bound_states()?)
}

/// f(k) on the grid of I.
pub fn f_from_i(ifun: &SampledComplexFunction, report: &PoleDetectionReport) -> Result<SampledComplexFunction> {
    jost_representation_from_i(ifun, report)?.boundary()
}

/// s_j = −2iκ_j/(ḟ(iκ_j)² I_j), checked real and positive.
pub(crate) fn s_from_residues(rep: &JostRepresentation, kappas: &[f64], residues: &[Complex64]) -> Result<Vec<f64>> {
    kappas
        .iter()
        .zip(residues)
        .map(|(&kappa, &ij)| {
            let fdot = rep.fdot_imaginary(kappa)?;
            let s = -2.0 * I * kappa / (fdot * fdot * ij);
            if s.im.abs() > 1e-2 * s.re.abs() || !(s.re > 0.0) {
                return Err(Error::invariant(
                    "s_j real and positive",
                    format!("s at κ = {kappa} came out {s}"),
                ));
            }
            Ok(s.re)
        })
        .collect()
}

/// S(k) = conj f(k)/f(k) and the bound-state data, s_j from ḟ(iκ_j).
pub fn scattering_from_i(ifun: &SampledComplexFunction, report: &PoleDetectionReport) -> Result<ScatteringTriple> {
    let rep = jost_representation_from_i(ifun, report)?;
    let f = rep.boundary()?;
    let s_matrix = f.map(Symmetry::Hermitian, |_, v| v.conj() / v)?;

    let plain = BoundStateSet::new(report.kappas.clone())?;
    let u = f.map(Symmetry::Hermitian, |k, v| {
        let w = blaschke(Complex64::new(k, 0.0), &plain).expect("real k is never a pole");
        v / (v.conj() * w * w)
    })?;
    let index = winding_index(&u)?;
    if index != report.zero_at_origin as i64 {
        return Err(Error::Index(index));
    }

    let mut bound = report.bound_states()?;
    if report.count > 0 {
        bound = bound.with_s(s_from_residues(&rep, &report.kappas, &report.residues)?)?;
    }
    ScatteringTriple::new(s_matrix, bound)
}

/// ρ: density Im I(k)/π at λ = k² and atoms c_j = 2κ_j Im I_j at −κ_j².
pub fn spectral_from_i(ifun: &SampledComplexFunction, report: &PoleDetectionReport) -> Result<SpectralMeasure> {
    let modulus = modulus_f_from_i(ifun)?;
    let pts = ifun.points();
    let grid = Grid::new(GridKind::Spectral, pts.iter().map(|k| k * k).collect())?;
    // √λ/(π|f|²)
    let density = pts
        .iter()
        .zip(&modulus)
        .map(|(&k, m)| k / (std::f64::consts::PI * m * m))
        .collect();
    let mut atoms = Vec::with_capacity(report.count);
    for (&kappa, ij) in report.kappas.iter().zip(&report.residues) {
        let c = 2.0 * kappa * ij.im;
        if !(c > 0.0) {
            return Err(Error::invariant("c_j > 0", format!("c at κ = {kappa} came out {c}")));
        }
        atoms.push(SpectralAtom {
            lambda: -kappa * kappa,
            mass: c,
        });
    }
    SpectralMeasure::new(grid, density, atoms, report.zero_at_origin)
}

#[cfg(test)]
mod tests;
