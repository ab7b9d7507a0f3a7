//! Cauchy integrals over the real line from samples on k > 0.
//!
//! Data h on the half-line are extended to s < 0 by their symmetry
//! (h(−s) = σ·conj h(s)), joined linearly between nodes, and integrated
//! against 1/(s − z) exactly panel by panel. Beyond the last node h is
//! replaced by a tail a/s + b/s² whose contribution is known in closed form.
//!
//! All operations return (1/2πi)∫ h(s)/(s − z) ds over the whole line.

pub mod quadrature;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{Grid, SampledComplexFunction, Symmetry};
use crate::{Error, Result};
use quadrature::{cauchy_panels, Pole};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * std::f64::consts::PI);

/// Model of h beyond the cutoff K = last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TailModel {
    /// Truncate at K.
    None,
    /// h(s) = c/s² for s > K.
    InverseSquare(f64),
    /// a/s + b/s² fitted by least squares over the last decade [K/10, K].
    #[default]
    Fitted,
}

/// Samples of h on [0, K] prepared for repeated Cauchy evaluations.
#[derive(Debug, Clone)]
pub struct HalfLine {
    nodes: Vec<f64>,
    vals: Vec<Complex64>,
    conj_vals: Vec<Complex64>,
    sigma: f64,
    tail_a: Complex64,
    tail_b: Complex64,
    kmax: f64,
    max_step: f64,
}

impl HalfLine {
    pub fn new(h: &SampledComplexFunction, tail: TailModel) -> Result<Self> {
        let sigma = h
            .symmetry()
            .sign()
            .ok_or_else(|| Error::Precondition("Cauchy integrals need hermitian or antihermitian data".into()))?;
        if let Some(i) = h.values().iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Precondition(format!(
                "sample {i} (k = {}) is not finite",
                h.points()[i]
            )));
        }
        if h.grid().len() < 3 {
            return Err(Error::Grid("Cauchy integrals need at least three samples".into()));
        }
        let pts = h.points();
        let vs = h.values();
        let origin = origin_value(pts, vs, sigma);
        let mut nodes = Vec::with_capacity(pts.len() + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(pts);
        let mut vals = Vec::with_capacity(nodes.len());
        vals.push(origin);
        vals.extend_from_slice(vs);
        let (tail_a, tail_b) = fit_tail(pts, vs, sigma, tail);
        let max_step = nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let conj_vals = vals.iter().map(|v| v.conj()).collect();
        Ok(HalfLine {
            nodes,
            vals,
            conj_vals,
            sigma,
            tail_a,
            tail_b,
            kmax: h.grid().last(),
            max_step,
        })
    }

    /// Tail coefficients (a, b) of h ≈ a/s + b/s² beyond K.
    pub fn tail_coefficients(&self) -> (Complex64, Complex64) {
        (self.tail_a, self.tail_b)
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    /// Value at z off the axis, without the proximity check.
    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        let direct = cauchy_panels(&self.nodes, &self.vals, Pole::Off(z));
        let mirror = cauchy_panels(&self.nodes, &self.conj_vals, Pole::Off(-z));
        (direct - mirror * self.sigma + self.tail(z)) / TWO_PI_I
    }

    /// Boundary value from above at grid index `i`.
    pub(crate) fn boundary(&self, i: usize) -> Complex64 {
        let p = i + 1;
        let last = self.nodes.len() - 1;
        if p == last {
            // the tail model is singular at K itself: extrapolate the principal value, keep h/2 exact
            let pv = |j: usize| self.boundary(j) - self.vals[j + 1] * 0.5;
            return (pv(i - 1) - pv(i - 2)) * 3.0 + pv(i - 3) + self.vals[p] * 0.5;
        }
        let k = self.nodes[p];
        let direct = cauchy_panels(&self.nodes, &self.vals, Pole::OnNode(p));
        let mirror = cauchy_panels(&self.nodes, &self.conj_vals, Pole::Off(Complex64::new(-k, 0.0)));
        (direct - mirror * self.sigma + self.tail(Complex64::new(k, 0.0))) / TWO_PI_I
    }

    pub(crate) fn boundary_all(&self) -> Vec<Complex64> {
        (0..self.nodes.len() - 1)
            .into_par_iter()
            .map(|i| self.boundary(i))
            .collect()
    }

    fn tail(&self, z: Complex64) -> Complex64 {
        if self.tail_a == Complex64::new(0.0, 0.0) && self.tail_b == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let (p1, p2) = tail_moments(z, self.kmax);
        let (m1, m2) = tail_moments(-z, self.kmax);
        self.tail_a * p1 + self.tail_b * p2 - (self.tail_a.conj() * m1 + self.tail_b.conj() * m2) * self.sigma
    }
}

/// Even part extrapolated quadratically in s (linear in s²); odd part 0.
fn origin_value(pts: &[f64], vs: &[Complex64], sigma: f64) -> Complex64 {
    let (s1, s2) = (pts[0] * pts[0], pts[1] * pts[1]);
    let extrap = |v1: f64, v2: f64| v1 - (v2 - v1) * s1 / (s2 - s1);
    if sigma > 0.0 {
        Complex64::new(extrap(vs[0].re, vs[1].re), 0.0)
    } else {
        Complex64::new(0.0, extrap(vs[0].im, vs[1].im))
    }
}

fn fit_tail(pts: &[f64], vs: &[Complex64], sigma: f64, tail: TailModel) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    match tail {
        TailModel::None => (zero, zero),
        TailModel::InverseSquare(c) => (zero, Complex64::new(c, 0.0)),
        TailModel::Fitted => {
            let kmax = pts[pts.len() - 1];
            let start = pts.partition_point(|&s| s < 0.1 * kmax).min(pts.len() - 3);
            let window = &pts[start..];
            let vals = &vs[start..];
            // the odd part of h goes as a/s + c/s³, the even part as b/s² + d/s⁴
            let odd = |part: fn(&Complex64) -> f64| windowed_leading(window, vals, part, 1);
            let even = |part: fn(&Complex64) -> f64| windowed_leading(window, vals, part, 2);
            if sigma > 0.0 {
                (Complex64::new(0.0, odd(|v| v.im)), Complex64::new(even(|v| v.re), 0.0))
            } else {
                (Complex64::new(odd(|v| v.re), 0.0), Complex64::new(0.0, even(|v| v.im)))
            }
        }
    }
}

/// Leading coefficient of y ≈ c₀/s^p + c₁/s^{p+2}.
pub(crate) fn windowed_leading(pts: &[f64], vs: &[Complex64], part: fn(&Complex64) -> f64, p: i32) -> f64 {
    windowed_series(pts, vs, part, p, 2)[0]
}

/// c_m in y ≈ Σ c_m/s^{p+2m}, m < terms, by least squares on s^p·y under a
/// Hann window so that oscillations in the window average out.
pub(crate) fn windowed_series(
    pts: &[f64],
    vs: &[Complex64],
    part: fn(&Complex64) -> f64,
    p: i32,
    terms: usize,
) -> Vec<f64> {
    let (s0, s1) = (pts[0], pts[pts.len() - 1]);
    let mut g = DMatrix::<f64>::zeros(terms, terms);
    let mut r = DVector::<f64>::zeros(terms);
    for (&s, v) in pts.iter().zip(vs) {
        let w = (std::f64::consts::PI * (s - s0) / (s1 - s0)).sin().powi(2);
        let y = part(v) * s.powi(p);
        // basis (K/s)^{2m} keeps the normal equations balanced
        let basis: Vec<f64> = (0..terms).map(|m| (s1 / s).powi(2 * m as i32)).collect();
        for i in 0..terms {
            r[i] += w * y * basis[i];
            for j in 0..terms {
                g[(i, j)] += w * basis[i] * basis[j];
            }
        }
    }
    let c = g.lu().solve(&r).unwrap_or_else(|| DVector::zeros(terms));
    (0..terms).map(|m| c[m] * s1.powi(2 * m as i32)).collect()
}

/// (∫_K^∞ ds/(s(s−z)), ∫_K^∞ ds/(s²(s−z))).
fn tail_moments(z: Complex64, kmax: f64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 * kmax {
        let r = z / kmax;
        let mut p = Complex64::new(1.0, 0.0);
        let mut t1 = Complex64::new(0.0, 0.0);
        let mut t2 = Complex64::new(0.0, 0.0);
        for n in 0..60 {
            t1 += p / (n + 1) as f64;
            t2 += p / (n + 2) as f64;
            p *= r;
            if p.norm() < 1e-18 {
                break;
            }
        }
        (t1 / kmax, t2 / (kmax * kmax))
    } else {
        let l = (Complex64::new(kmax, 0.0) / (Complex64::new(kmax, 0.0) - z)).ln();
        let t1 = l / z;
        (t1, (t1 - 1.0 / kmax) / z)
    }
}

fn check_distance(z: Complex64, spacing: f64) -> Result<()> {
    if !(z.im > 0.0) || z.im < 2.0 * spacing {
        return Err(Error::PoleProximity {
            z: format!("{z}"),
            distance: z.im,
        });
    }
    Ok(())
}

/// (1/2πi)∫ h(s)/(s − z) ds over the symmetric extension of h, Im z > 0.
///
/// Points closer to the axis than two grid spacings are rejected; use
/// [`plemelj_boundary`] there.
pub fn cauchy_integral(h: &SampledComplexFunction, z: Complex64, tail: TailModel) -> Result<Complex64> {
    let hl = HalfLine::new(h, tail)?;
    check_distance(z, hl.max_step)?;
    Ok(hl.eval(z))
}

/// Boundary value (1/2πi)∫ h(s)/(s − k − i0) ds = PV part + h(k)/2 at a grid point k.
pub fn plemelj_boundary(h: &SampledComplexFunction, k: f64, tail: TailModel) -> Result<Complex64> {
    let i = h
        .grid()
        .index_of(k)
        .ok_or_else(|| Error::Precondition(format!("k = {k} is not a grid point")))?;
    Ok(HalfLine::new(h, tail)?.boundary(i))
}

/// [`plemelj_boundary`] at every grid point.
pub fn plemelj_on_grid(h: &SampledComplexFunction, tail: TailModel) -> Result<Vec<Complex64>> {
    Ok(HalfLine::new(h, tail)?.boundary_all())
}

fn even_real(grid: &Grid, samples: &[f64], scale: f64) -> Result<SampledComplexFunction> {
    SampledComplexFunction::new(
        grid.clone(),
        samples.iter().map(|&v| Complex64::new(scale * v, 0.0)).collect(),
        Symmetry::Hermitian,
    )
}

/// ln f₀(z) = (1/iπ)∫ ln|f₀(t)|/(t − z) dt with ln|f₀| even.
pub fn schwarz_reconstruct(grid: &Grid, log_modulus: &[f64], z: Complex64, tail: TailModel) -> Result<Complex64> {
    cauchy_integral(&even_real(grid, log_modulus, 2.0)?, z, tail)
}

/// Boundary values ln f₀(k + i0) of [`schwarz_reconstruct`] at every grid point.
pub fn schwarz_boundary(grid: &Grid, log_modulus: &[f64], tail: TailModel) -> Result<Vec<Complex64>> {
    plemelj_on_grid(&even_real(grid, log_modulus, 2.0)?, tail)
}

/// (1/iπ)∫₀^∞ z·ln g(s)/(s² − z²) ds for even real ln g.
pub fn symmetric_cauchy(grid: &Grid, g_log: &[f64], z: Complex64, tail: TailModel) -> Result<Complex64> {
    let h = even_real(grid, g_log, 1.0)?;
    let hl = HalfLine::new(&h, tail)?;
    check_distance(z, hl.max_step)?;
    // 2z/(s² − z²) = 1/(s − z) − 1/(s + z)
    let direct = cauchy_panels(&hl.nodes, &hl.vals, Pole::Off(z)) - cauchy_panels(&hl.nodes, &hl.vals, Pole::Off(-z));
    Ok((direct + hl.tail(z)) / TWO_PI_I)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::square_well::SquareWell;
    use crate::model::{blaschke, BoundStateSet, GridKind};
    use approx::assert_abs_diff_eq;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn grid(k0: f64, k1: f64, n: usize) -> Grid {
        Grid::uniform(GridKind::Momentum, k0, k1, n).unwrap()
    }

    fn lorentzian(g: &Grid) -> SampledComplexFunction {
        SampledComplexFunction::from_fn(g, Symmetry::Hermitian, |s| Complex64::new(1.0 / (s * s + 1.0), 0.0)).unwrap()
    }

    #[test]
    fn lorentzian_at_two_i() {
        let g = grid(0.01, 60.0, 6000);
        let h = lorentzian(&g);
        let v = cauchy_integral(&h, Complex64::new(0.0, 2.0), TailModel::Fitted).unwrap();
        assert!((v - 1.0 / 6.0).norm() < 1e-5, "{v}");
        let v = cauchy_integral(&h, Complex64::new(0.0, 2.0), TailModel::InverseSquare(1.0)).unwrap();
        assert!((v - 1.0 / 6.0).norm() < 1e-5, "{v}");
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = grid(0.05, 20.0, 400);
        let h = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |_| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(
            cauchy_integral(&h, Complex64::new(0.3, 1.0), TailModel::Fitted).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            plemelj_boundary(&h, g.points()[7], TailModel::Fitted).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn plemelj_near_origin_is_half_the_value() {
        let g = grid(1e-3, 60.0, 60000);
        let v = plemelj_boundary(&lorentzian(&g), 1e-3, TailModel::Fitted).unwrap();
        assert_abs_diff_eq!(v.re, 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn plemelj_matches_lorentzian_closed_form() {
        // (1/2πi)∫ h/(s−z) ds = i/(2(z+i)) in the upper half-plane
        let g = grid(0.01, 60.0, 6000);
        let h = lorentzian(&g);
        let b = plemelj_on_grid(&h, TailModel::Fitted).unwrap();
        for (i, &k) in g.points().iter().enumerate().step_by(97) {
            let exact = 1.0 / (2.0 * (1.0 - I * k));
            assert!((b[i] - exact).norm() < 1e-5, "k={k}: {} vs {exact}", b[i]);
        }
    }

    #[test]
    fn reproduces_upper_analytic_function() {
        let g = grid(0.01, 60.0, 6000);
        let h = SampledComplexFunction::from_fn(&g, Symmetry::Antihermitian, |s| 1.0 / (s + I)).unwrap();
        let hl = HalfLine::new(&h, TailModel::Fitted).unwrap();
        // deterministic pseudo-random points in the upper half-plane
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let z = Complex64::new(-10.0 + 20.0 * next(), 0.05 + 5.0 * next());
            let v = hl.eval(z);
            let exact = 1.0 / (z + I);
            assert!((v - exact).norm() < 1e-4, "z={z}: {v} vs {exact}");
        }
    }

    #[test]
    fn jump_relation() {
        let g = grid(0.01, 40.0, 8000);
        let h =
            SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |s| Complex64::new((-s * s).exp(), 0.0)).unwrap();
        let hl = HalfLine::new(&h, TailModel::None).unwrap();
        let k = 0.7;
        let eps = 1e-3;
        // lower-side value via the reflected evaluation: C(k − iε) = −conj(C(k + iε)) for real even h
        let up = hl.eval(Complex64::new(k, eps));
        let down = cauchy_panels(&hl.nodes, &hl.vals, Pole::Off(Complex64::new(k, -eps)))
            - cauchy_panels(&hl.nodes, &hl.conj_vals, Pole::Off(Complex64::new(-k, eps)));
        let jump = up - down / TWO_PI_I;
        assert!((jump - (-k * k).exp()).norm() < 5e-3, "{jump}");
    }

    #[test]
    fn linearity() {
        let g = grid(0.05, 30.0, 900);
        let h1 = lorentzian(&g);
        let h2 = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |s| {
            Complex64::new(1.0 / (s * s + 4.0), s / (s * s + 9.0))
        })
        .unwrap();
        let (a, b) = (Complex64::new(2.5, 0.0), Complex64::new(-1.25, 0.0));
        let sum = SampledComplexFunction::new(
            g.clone(),
            h1.values()
                .iter()
                .zip(h2.values())
                .map(|(x, y)| a * x + b * y)
                .collect(),
            Symmetry::Hermitian,
        )
        .unwrap();
        let z = Complex64::new(0.4, 1.3);
        let lhs = cauchy_integral(&sum, z, TailModel::Fitted).unwrap();
        let rhs = a * cauchy_integral(&h1, z, TailModel::Fitted).unwrap()
            + b * cauchy_integral(&h2, z, TailModel::Fitted).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        let k = g.points()[123];
        let lhs = plemelj_boundary(&sum, k, TailModel::Fitted).unwrap();
        let rhs = a * plemelj_boundary(&h1, k, TailModel::Fitted).unwrap()
            + b * plemelj_boundary(&h2, k, TailModel::Fitted).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn symmetric_form_agrees() {
        let g = grid(0.05, 60.0, 2400);
        let vals: Vec<f64> = g.points().iter().map(|&s| (1.0 + 1.0 / (s * s + 2.0)).ln()).collect();
        let h = even_real(&g, &vals, 1.0).unwrap();
        for z in [
            Complex64::new(0.0, 2.0),
            Complex64::new(3.0, 0.5),
            Complex64::new(-1.0, 7.0),
        ] {
            let a = symmetric_cauchy(&g, &vals, z, TailModel::Fitted).unwrap();
            let b = cauchy_integral(&h, z, TailModel::Fitted).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_points_near_axis() {
        let g = grid(0.05, 10.0, 200);
        let err = cauchy_integral(&lorentzian(&g), Complex64::new(1.0, 0.01), TailModel::Fitted).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
        assert!(plemelj_boundary(&lorentzian(&g), 0.123456, TailModel::Fitted).is_err());
    }

    #[test]
    fn plemelj_is_the_limit_of_the_off_axis_integral() {
        let g = grid(0.01, 40.0, 4000);
        let h = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |s| {
            Complex64::new(1.0 / (1.0 + s.powi(4)), 0.0)
        })
        .unwrap();
        let hl = HalfLine::new(&h, TailModel::Fitted).unwrap();
        let i = 150;
        let k = g.points()[i];
        let b = hl.boundary(i);
        let d1 = (hl.eval(Complex64::new(k, 0.08)) - b).norm();
        let d2 = (hl.eval(Complex64::new(k, 0.04)) - b).norm();
        let ratio = d1 / d2;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn zero_log_modulus() {
        let g = grid(0.05, 20.0, 400);
        let zeros = vec![0.0; g.len()];
        assert_eq!(
            schwarz_reconstruct(&g, &zeros, Complex64::new(0.5, 1.0), TailModel::Fitted).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            symmetric_cauchy(&g, &zeros, Complex64::new(0.5, 1.0), TailModel::Fitted).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn square_well_from_modulus() {
        let well = SquareWell::new(1.0, 1.0);
        let g = Grid::default_momentum();
        let logm: Vec<f64> = g
            .points()
            .iter()
            .map(|&k| well.jost(Complex64::new(k, 0.0)).f.norm().ln())
            .collect();
        let ln_f = schwarz_boundary(&g, &logm, TailModel::Fitted).unwrap();
        let mut worst: f64 = 0.0;
        for i in g.range_indices(0.2, 10.0) {
            let k = g.points()[i];
            let exact = well.jost(Complex64::new(k, 0.0)).f;
            worst = worst.max((ln_f[i].exp() / exact - 1.0).norm());
        }
        assert!(worst < 1e-3, "worst relative error {worst}");

        // symmetric form with g = k/Im I at z = 2i
        let glog: Vec<f64> = g
            .points()
            .iter()
            .map(|&k| (k / well.jost(Complex64::new(k, 0.0)).i_function.im).ln())
            .collect();
        let z = Complex64::new(0.0, 2.0);
        let f = symmetric_cauchy(&g, &glog, z, TailModel::Fitted).unwrap().exp()
            * blaschke(z, &BoundStateSet::empty()).unwrap();
        let exact = well.jost(z).f;
        assert!((f / exact - 1.0).norm() < 1e-3, "{f} vs {exact}");
    }
}
