//! The pole signal y(t) = Im (1/2πi)∫ e^{ikt}(I(k) − ik) dk for t > 0.
//!
//! Closing the contour upward leaves y(t) = Σ Im I_j e^{−κ_j t} + Im I₀/2.
//! Before integrating, the a/k + b/k² decay of I − ik is removed with
//! a/(k+i) + (b+ia)/(k+i)², which is analytic above the axis and so has no
//! transform at t > 0. A cosine taper over the top of the band suppresses
//! the truncation ripple of oscillating terms.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cauchy::quadrature::fourier_panels;
use crate::model::SampledComplexFunction;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fraction of the band [0, K] over which the taper falls from 1 to 0.
pub const TAPER_FRACTION: f64 = 0.5;

pub(crate) struct PoleSignal {
    /// Nodes from 0, with the gap below the first sample filled at the grid spacing.
    nodes: Vec<f64>,
    resid: Vec<Complex64>,
    /// Strength of the iα/(k(k²+1)) part removed from the samples and
    /// transformed analytically; it carries any 1/k pole at the origin.
    alpha: f64,
    spacing: Option<f64>,
}

fn tail_fit(pts: &[f64], vs: &[Complex64]) -> (Complex64, Complex64) {
    let kmax = pts[pts.len() - 1];
    let start = pts.partition_point(|&s| s < 0.1 * kmax).min(pts.len() - 3);
    let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
    let (mut r1, mut r2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (&s, &v) in pts[start..].iter().zip(&vs[start..]) {
        let (p1, p2) = (1.0 / s, 1.0 / (s * s));
        g11 += p1 * p1;
        g12 += p1 * p2;
        g22 += p2 * p2;
        r1 += v * p1;
        r2 += v * p2;
    }
    let det = g11 * g22 - g12 * g12;
    let a = (r1 * g22 - r2 * g12) / det;
    let b = (r2 * g11 - r1 * g12) / det;
    (Complex64::new(0.0, a.im), Complex64::new(b.re, 0.0))
}

fn taper(k: f64, kmax: f64, enabled: bool) -> f64 {
    let start = (1.0 - TAPER_FRACTION) * kmax;
    if !enabled || k <= start {
        1.0
    } else {
        let u = (k - start) / (kmax - start);
        0.5 * (1.0 + (std::f64::consts::PI * u).cos())
    }
}

impl PoleSignal {
    pub(crate) fn new(ifun: &SampledComplexFunction, tapered: bool) -> Self {
        let pts = ifun.points();
        let h: Vec<Complex64> = pts.iter().zip(ifun.values()).map(|(&k, &v)| v - I * k).collect();
        let (a, b) = tail_fit(pts, &h);
        let kmax = pts[pts.len() - 1];
        let resid: Vec<Complex64> = pts
            .iter()
            .zip(&h)
            .map(|(&k, &v)| {
                let zp = Complex64::new(k, 1.0);
                (v - a / zp - (b + I * a) / (zp * zp)) * taper(k, kmax, tapered)
            })
            .collect();
        // α from Im r ≈ α/k + βk + γk³ through the first three samples
        let m = nalgebra::Matrix3::from_fn(|r, c| {
            let k = pts[r];
            [1.0 / k, k, k * k * k][c]
        });
        let y = nalgebra::Vector3::new(resid[0].im, resid[1].im, resid[2].im);
        let alpha = m.lu().solve(&y).map_or(0.0, |v| v[0]);
        let resid: Vec<Complex64> = pts
            .iter()
            .zip(resid)
            .map(|(&k, r)| r - I * (alpha / (k * (k * k + 1.0))))
            .collect();
        // regular part near 0: Re = c₀ + c₂k², Im = βk + γk³
        let (k1, k2) = (pts[0], pts[1]);
        let c2 = (resid[1].re - resid[0].re) / (k2 * k2 - k1 * k1);
        let c0 = resid[0].re - c2 * k1 * k1;
        let det = k1 * k2 * (k2 * k2 - k1 * k1);
        let beta = (resid[0].im * k2 * k2 * k2 - resid[1].im * k1 * k1 * k1) / det;
        let gamma = (resid[1].im * k1 - resid[0].im * k2) / det;
        let model = |k: f64| Complex64::new(c0 + c2 * k * k, beta * k + gamma * k * k * k);

        let step = k2 - k1;
        let gaps = (k1 / step).round().max(1.0) as usize;
        let mut nodes: Vec<f64> = (0..gaps).map(|j| k1 * j as f64 / gaps as f64).collect();
        let mut vals: Vec<Complex64> = nodes.iter().map(|&k| model(k)).collect();
        nodes.extend_from_slice(pts);
        vals.extend(resid);
        let uniform = ifun.grid().is_uniform() && ((k1 / gaps as f64) - step).abs() <= 1e-6 * step;
        PoleSignal {
            nodes,
            resid: vals,
            alpha,
            spacing: uniform.then_some(step),
        }
    }

    /// y(t) at one t > 0.
    pub(crate) fn at(&self, t: f64) -> f64 {
        let mut half = fourier_panels(&self.nodes, &self.resid, t).re;
        if let Some(d) = self.spacing {
            // linear interpolation on a uniform grid scales the transform by sinc²(tΔ/2)
            let u = 0.5 * t * d;
            let sinc = if u.abs() < 1e-8 { 1.0 } else { u.sin() / u };
            half /= sinc * sinc;
        }
        // Re ∫₀^∞ e^{ikt} iα/(k(k²+1)) dk = −α(π/2)(1 − e^{−t})
        half -= self.alpha * std::f64::consts::FRAC_PI_2 * (1.0 - (-t).exp());
        // y = Im[(2·half)/(2πi)] = −half/π
        -half / std::f64::consts::PI
    }

    pub(crate) fn sample(&self, times: &[f64]) -> Vec<f64> {
        times.par_iter().map(|&t| self.at(t)).collect()
    }
}
