//! From the scattering triple or the spectral function back to I.
//!
//! f comes from a scalar Riemann problem (phase of S(−k)/w²) or from the
//! Schwarz formula (|f| from the density). I is then assembled as
//! ik + Σ I_j/(k − iκ_j) + 𝒥, where 𝒥 is the Cauchy integral of its own
//! jump 2i·[t(|f|⁻² − 1) − Σ Im I_j·t/(t² + κ_j²)].

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{windowed_series, HalfLine, TailModel};
use crate::i_to_data::{representation_from_modulus, JostRepresentation};
use crate::model::{
    blaschke, unwrap_phase, winding_index, BoundStateSet, SampledComplexFunction, ScatteringTriple, SpectralMeasure,
    Symmetry,
};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest accepted sup |𝒥| over the last decade of the grid.
pub const DEFAULT_DECAY_LIMIT: f64 = 1.0;

/// Prefactor of the jump integral, 𝒥(z) = (1/π)∫ ψ(t)/(t − z) dt, fixed by
/// comparison with the closed-form square well (see the calibration test).
pub const JUMP_NORMALIZATION: f64 = 1.0 / std::f64::consts::PI;

/// Samples of the holomorphic part 𝒥(k) of I.
#[derive(Debug, Clone)]
pub struct HolomorphicPart {
    pub values: SampledComplexFunction,
    /// sup |𝒥| over [K/10, K].
    pub decay_check: f64,
}

/// I with the intermediate objects of its reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub i_function: SampledComplexFunction,
    pub jost: SampledComplexFunction,
    pub holomorphic: HolomorphicPart,
    /// Bound states with residues I_j (and I₀ when f(0) = 0).
    pub bound: BoundStateSet,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub decay_check: f64,
    /// sup |I − conj I − 2ik/|f|²| relative to 2k/|f|².
    pub jump_residual: f64,
    pub calibration_constant: f64,
    pub winding_index: i64,
}

/// ln of the unimodular jump S(−k)/w²(k), index and the f(0) = 0 flag.
fn scattering_jump(triple: &ScatteringTriple) -> Result<(SampledComplexFunction, i64)> {
    let bound = triple.bound();
    let plain = BoundStateSet::new(bound.kappas().to_vec())?;
    let s = triple.s_matrix();
    let u = s.map(Symmetry::Hermitian, |k, v| {
        let w = blaschke(Complex64::new(k, 0.0), &plain).expect("real k is never a pole");
        v.conj() / (w * w)
    })?;
    let index = winding_index(&u)?;
    if !(0..=1).contains(&index) {
        return Err(Error::Index(index));
    }
    if bound.zero_at_origin() && index != 1 {
        return Err(Error::invariant(
            "f(0) = 0 ⇔ index 1",
            format!("zero at origin declared but S(−k)/w² has index {index}"),
        ));
    }
    let u = if index == 1 {
        u.map(Symmetry::Hermitian, |k, v| v * (k + I) / (k - I))?
    } else {
        u
    };
    // phase unwrapped downward from K_max, where it is near 0
    let mut pts = u.points().to_vec();
    let mut vals = u.values().to_vec();
    pts.reverse();
    vals.reverse();
    let mut theta = unwrap_phase(&pts, &vals)?;
    theta.reverse();
    let h = SampledComplexFunction::new(
        u.grid().clone(),
        theta.into_iter().map(|t| Complex64::new(0.0, t)).collect(),
        Symmetry::Hermitian,
    )?;
    Ok((h, index))
}

/// f(z) = exp(C[ln S(−t)/w²(t)](z))·w(z), with S₁ and w₁ when the index is 1.
pub fn jost_representation_from_scattering(triple: &ScatteringTriple) -> Result<(JostRepresentation, i64)> {
    let (h, index) = scattering_jump(triple)?;
    let half = HalfLine::new(&h, TailModel::Fitted)?;
    let bound = triple.bound().clone().with_zero_at_origin(index == 1);
    Ok((JostRepresentation::new(h.grid().clone(), half, bound), index))
}

/// f(k) on the grid of S.
pub fn f_from_scattering(triple: &ScatteringTriple) -> Result<SampledComplexFunction> {
    jost_representation_from_scattering(triple)?.0.boundary()
}

/// f(z) from |f(k)|² = k/(π·density(k²)) by the Schwarz formula, times w.
pub fn jost_representation_from_spectral(measure: &SpectralMeasure) -> Result<JostRepresentation> {
    let grid = measure.momentum_grid();
    let g: Vec<f64> = grid
        .points()
        .iter()
        .zip(measure.density())
        .map(|(&k, &d)| k / (std::f64::consts::PI * d))
        .collect();
    representation_from_modulus(&grid, &g, measure.bound_states()?)
}

/// f(k) on the momentum grid k = √λ of the measure.
pub fn f_from_spectral(measure: &SpectralMeasure) -> Result<SampledComplexFunction> {
    jost_representation_from_spectral(measure)?.boundary()
}

fn imaginary_residue(kappa: f64, r: Complex64) -> Result<Complex64> {
    if !(r.im > 0.0) || r.re.abs() > 1e-3 * r.im {
        return Err(Error::invariant(
            "I_j purely imaginary with Im I_j > 0",
            format!("residue at κ = {kappa} came out {r}"),
        ));
    }
    Ok(Complex64::new(0.0, r.im))
}

/// I_j = −2iκ_j/(ḟ(iκ_j)² s_j).
pub fn residues_from_s(rep: &JostRepresentation, kappas: &[f64], s: &[f64]) -> Result<Vec<Complex64>> {
    kappas
        .iter()
        .zip(s)
        .map(|(&kappa, &sj)| {
            let fdot = rep.fdot_imaginary(kappa)?;
            imaginary_residue(kappa, -2.0 * I * kappa / (fdot * fdot * sj))
        })
        .collect()
}

/// I_j = i c_j/(2κ_j).
pub fn residues_from_c(kappas: &[f64], c: &[f64]) -> Result<Vec<Complex64>> {
    kappas
        .iter()
        .zip(c)
        .map(|(&kappa, &cj)| imaginary_residue(kappa, Complex64::new(0.0, cj / (2.0 * kappa))))
        .collect()
}

/// Residues from whichever norming constants the set carries, c_j first.
pub fn residues_from_data(rep: Option<&JostRepresentation>, bound: &BoundStateSet) -> Result<Vec<Complex64>> {
    if bound.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(c) = bound.c() {
        return residues_from_c(bound.kappas(), c);
    }
    match (bound.s(), rep) {
        (Some(s), Some(rep)) => residues_from_s(rep, bound.kappas(), s),
        _ => Err(Error::Precondition(
            "residues need c_j, or s_j with an analytic f".into(),
        )),
    }
}

/// A(0,0) = −lim ik(f(k) − 1). Re ik(f − 1) = −A(0,0) − A_yy(0,0)/k² + …
/// carries only even powers of 1/k; it is fitted by c0 + c2/k² over [K/10, K]
/// under a Hann window, which also averages out the e^{2ika} ripple.
pub fn a00_limit(f: &SampledComplexFunction) -> Result<f64> {
    let pts = f.points();
    let vals = f.values();
    let kmax = f.grid().last();
    if (vals[vals.len() - 1] - 1.0).norm() > 0.5 {
        return Err(Error::Precondition(format!(
            "f(K_max) = {} is not close to 1",
            vals[vals.len() - 1]
        )));
    }
    let range = f.grid().range_indices(0.1 * kmax, kmax);
    if range.len() < 3 {
        return Err(Error::Grid("too few samples in the last decade".into()));
    }
    let y: Vec<Complex64> = range.clone().map(|i| I * pts[i] * (vals[i] - 1.0)).collect();
    let k = &pts[range];
    let c = windowed_series(k, &y, |v| v.re, 0, 2);
    let (s0, s1) = (k[0], k[k.len() - 1]);
    let hann = |s: f64| (std::f64::consts::PI * (s - s0) / (s1 - s0)).sin().powi(2);
    let wsum: f64 = k.iter().map(|&s| hann(s)).sum();
    let misfit = (k
        .iter()
        .zip(&y)
        .map(|(&s, v)| hann(s) * (v.re - c[0] - c[1] / (s * s)).powi(2))
        .sum::<f64>()
        / wsum)
        .sqrt();
    let limit = 0.25 * (1.0 + c[0].abs());
    if misfit > limit {
        return Err(Error::Fit {
            residual: misfit,
            threshold: limit,
            context: "large-k fit of ik(f − 1); K_max too small?".into(),
        });
    }
    Ok(-c[0])
}

/// (f'(0,0), I₀) = (−i/ḟ(0), −i/ḟ(0)²) when f(0) = 0.
pub fn residue_at_origin(fdot0: Complex64) -> Result<(Complex64, Complex64)> {
    if fdot0.norm() < 1e-12 {
        return Err(Error::Precondition(format!("ḟ(0) = {fdot0} vanishes")));
    }
    Ok((-I / fdot0, -I / (fdot0 * fdot0)))
}

/// 𝒥(k + i0) from |f| and the residues.
pub fn holomorphic_part(f: &SampledComplexFunction, bound: &BoundStateSet) -> Result<HolomorphicPart> {
    holomorphic_part_with(f, bound, DEFAULT_DECAY_LIMIT)
}

pub fn holomorphic_part_with(
    f: &SampledComplexFunction,
    bound: &BoundStateSet,
    decay_limit: f64,
) -> Result<HolomorphicPart> {
    if let Some(i) = f.values().iter().position(|v| !(v.norm() > 0.0)) {
        return Err(Error::invariant("|f| > 0", format!("f({}) = 0", f.points()[i])));
    }
    let residues = residues_or_empty(bound)?;
    let origin = origin_term(bound)?;
    // numerical part of the jump: t(|f|⁻² − 1), less Im I₀/t when f(0) = 0
    let psi = f.map(Symmetry::Hermitian, |t, v| {
        let mut p = t * (1.0 / v.norm_sqr() - 1.0);
        if let Some(i0) = origin {
            p -= i0.im / t;
        }
        Complex64::new(0.0, 2.0 * p)
    })?;
    let numeric = HalfLine::new(&psi, TailModel::Fitted)?.boundary_all();
    // each Im I_j·t/(t² + κ²) in ψ integrates to −I_j/(z + iκ)
    let values: Vec<Complex64> = f
        .points()
        .iter()
        .zip(numeric)
        .map(|(&k, n)| {
            let poles: Complex64 = bound
                .kappas()
                .iter()
                .zip(&residues)
                .map(|(&kappa, &ij)| -ij / (k + I * kappa))
                .sum();
            n + poles
        })
        .collect();
    let values = SampledComplexFunction::new(f.grid().clone(), values, Symmetry::Hermitian)?;
    let kmax = f.grid().last();
    let decay_check = f
        .grid()
        .range_indices(0.1 * kmax, kmax)
        .map(|i| values.values()[i].norm())
        .fold(0.0, f64::max);
    if !(decay_check <= decay_limit) {
        return Err(Error::Decay {
            value: decay_check,
            limit: decay_limit,
        });
    }
    Ok(HolomorphicPart { values, decay_check })
}

fn residues_or_empty(bound: &BoundStateSet) -> Result<Vec<Complex64>> {
    if bound.is_empty() {
        return Ok(Vec::new());
    }
    bound
        .residues()
        .map(|r| r.to_vec())
        .ok_or_else(|| Error::Precondition("bound states need residues I_j".into()))
}

fn origin_term(bound: &BoundStateSet) -> Result<Option<Complex64>> {
    if !bound.zero_at_origin() {
        return Ok(None);
    }
    bound
        .origin_residue()
        .map(Some)
        .ok_or_else(|| Error::Precondition("f(0) = 0 needs the residue I₀".into()))
}

/// I(k) = ik + Σ I_j/(k − iκ_j) [+ I₀/k] + 𝒥(k).
pub fn i_from_parts(j: &HolomorphicPart, bound: &BoundStateSet) -> Result<SampledComplexFunction> {
    let residues = residues_or_empty(bound)?;
    let origin = origin_term(bound)?;
    let out = j.values.map(Symmetry::Hermitian, |k, v| {
        let mut total = I * k + v;
        for (&kappa, &ij) in bound.kappas().iter().zip(&residues) {
            total += ij / (k - I * kappa);
        }
        if let Some(i0) = origin {
            total += i0 / k;
        }
        total
    })?;
    if let Some(i) = out.values().iter().position(|v| !(v.im > 0.0)) {
        return Err(Error::invariant(
            "Im I(k) > 0",
            format!("I({}) = {}", out.points()[i], out.values()[i]),
        ));
    }
    Ok(out)
}

fn jump_residual(i: &SampledComplexFunction, f: &SampledComplexFunction) -> f64 {
    i.points()
        .iter()
        .zip(i.values())
        .zip(f.values())
        .map(|((&k, iv), fv)| {
            let jump = 2.0 * k / fv.norm_sqr();
            (iv - iv.conj() - I * jump).norm() / jump
        })
        .fold(0.0, f64::max)
}

fn finish(rep: &JostRepresentation, bound: BoundStateSet, index: i64) -> Result<Reconstruction> {
    let jost = rep.boundary()?;
    let holomorphic = holomorphic_part(&jost, &bound)?;
    let i_function = i_from_parts(&holomorphic, &bound)?;
    let diagnostics = Diagnostics {
        decay_check: holomorphic.decay_check,
        jump_residual: jump_residual(&i_function, &jost),
        calibration_constant: JUMP_NORMALIZATION,
        winding_index: index,
    };
    Ok(Reconstruction {
        i_function,
        jost,
        holomorphic,
        bound,
        diagnostics,
    })
}

fn with_origin(rep: &JostRepresentation, bound: BoundStateSet) -> Result<BoundStateSet> {
    if !bound.zero_at_origin() || bound.origin_residue().is_some() {
        return Ok(bound);
    }
    let (_, i0) = residue_at_origin(rep.fdot_origin()?)?;
    bound.with_origin_residue(Some(i0))
}

/// The chain 𝒮 → f → 𝒥 → I.
pub fn i_from_scattering(triple: &ScatteringTriple) -> Result<Reconstruction> {
    let (rep, index) = jost_representation_from_scattering(triple)?;
    let residues = residues_from_data(Some(&rep), rep.bound())?;
    let mut bound = rep.bound().clone();
    if !residues.is_empty() {
        bound = bound.with_residues(residues)?;
    }
    let bound = with_origin(&rep, bound)?;
    finish(&rep, bound, index)
}

/// The chain ρ → f → 𝒥 → I.
pub fn i_from_spectral(measure: &SpectralMeasure) -> Result<Reconstruction> {
    let rep = jost_representation_from_spectral(measure)?;
    let residues = residues_from_data(Some(&rep), rep.bound())?;
    let mut bound = rep.bound().clone();
    if !residues.is_empty() {
        bound = bound.with_residues(residues)?;
    }
    let bound = with_origin(&rep, bound)?;
    let index = bound.zero_at_origin() as i64;
    finish(&rep, bound, index)
}
