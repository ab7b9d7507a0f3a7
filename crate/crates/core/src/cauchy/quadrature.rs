//! Product-integration rules on piecewise-linear data.
//!
//! Samples are joined linearly and the kernel is integrated exactly on every
//! panel, so the only discretization error is the O(Δ²) interpolation error
//! of the data, whatever the kernel does between nodes.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// ln(1 + w) with a series near w = 0.
fn ln1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        let mut term = w;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=6 {
            acc += term / n as f64 * if n % 2 == 1 { 1.0 } else { -1.0 };
            term *= w;
        }
        acc
    } else {
        (w + 1.0).ln()
    }
}

/// Where the pole of 1/(s − z) sits.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Pole {
    /// Off the nodes' line; principal logarithms are continuous along the panels.
    Off(Complex64),
    /// z = nodes[j] + i0.
    OnNode(usize),
}

/// ∫ v(s)/(s − z) ds over [nodes[0], nodes[last]] with v piecewise linear.
/// For `Pole::OnNode` the result is the boundary value from above:
/// principal value plus iπ v(z).
pub(crate) fn cauchy_panels(nodes: &[f64], vals: &[Complex64], pole: Pole) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes.len() - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let d = b - a;
        let m = (vals[j + 1] - vals[j]) / d;
        let (z, dl) = match pole {
            Pole::Off(z) => (z, ln1p(Complex64::new(d, 0.0) / (a - z))),
            Pole::OnNode(p) => {
                let k = nodes[p];
                let z = Complex64::new(k, 0.0);
                let dl = if j == p {
                    // ln(b − k) − ln 0; the ln 0 cancels against the left panel
                    Complex64::new((b - k).ln(), 0.0)
                } else if j + 1 == p {
                    // ln 0 − ln(a − z), with a − z = (k − a)e^{−iπ}
                    Complex64::new(-(k - a).ln(), std::f64::consts::PI)
                } else {
                    Complex64::new((d / (a - k)).ln_1p(), 0.0)
                };
                (z, dl)
            }
        };
        acc += (vals[j] + m * (z - a)) * dl + m * d;
    }
    acc
}

/// ∫ v(s) e^{ist} ds over the nodes with v piecewise linear (Filon rule).
pub(crate) fn fourier_panels(nodes: &[f64], vals: &[Complex64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes.len() - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let d = b - a;
        let m = (vals[j + 1] - vals[j]) / d;
        let (e0, e1) = moments(d, t);
        acc += (I * (a * t)).exp() * (vals[j] * e0 + m * e1);
    }
    acc
}

/// (∫₀^d e^{iut} du, ∫₀^d u e^{iut} du)
fn moments(d: f64, t: f64) -> (Complex64, Complex64) {
    let th = d * t;
    if th.abs() < 0.2 {
        // Taylor series in iθ
        let it = I * th;
        let mut p = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        for n in 0..14 {
            if n > 0 {
                p *= it;
                fact *= n as f64;
            }
            e0 += p / (fact * (n + 1) as f64);
            e1 += p / (fact * (n + 2) as f64);
        }
        (e0 * d, e1 * d * d)
    } else {
        let e = (I * th).exp();
        let it = I * t;
        let e0 = (e - 1.0) / it;
        let e1 = e * d / it - (e - 1.0) / (it * it);
        (e0, e1)
    }
}

/// Sine integral Si(x) = ∫₀^x sin(t)/t dt.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= 4.0 {
        // alternating power series
        let mut term = x;
        let mut acc = x;
        let x2 = x * x;
        let mut n = 0usize;
        loop {
            n += 1;
            term *= -x2 / ((2 * n) as f64 * (2 * n + 1) as f64);
            let add = term / (2 * n + 1) as f64;
            acc += add;
            if add.abs() <= 1e-17 * acc.abs() {
                break;
            }
        }
        acc
    } else {
        // E1(ix) = −Ci(x) + i(Si(x) − π/2), continued fraction by modified Lentz
        let z = Complex64::new(0.0, x);
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * an + b);
            c = b + Complex64::new(an, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        let e1 = h * (-z).exp();
        std::f64::consts::FRAC_PI_2 + e1.im
    }
}

/// ∫_K^∞ cos(b s)/s² ds for b >= 0.
pub fn cos_tail_inverse_square(b: f64, kmax: f64) -> f64 {
    let b = b.abs();
    if b == 0.0 {
        return 1.0 / kmax;
    }
    (b * kmax).cos() / kmax - b * (std::f64::consts::FRAC_PI_2 - sine_integral(b * kmax))
}

/// [∫_K^∞ sin(ks)/s ds, ∫ cos(ks)/s², ∫ sin(ks)/s³, …, ∫ cos(ks)/s⁶] for k >= 0,
/// by the recursions C_n = cos(Kk)/((n−1)K^{n−1}) − k·S_{n−1}/(n−1) and
/// S_n = sin(Kk)/((n−1)K^{n−1}) + k·C_{n−1}/(n−1). At k = 0 the first entry is
/// the limit π/2 from k > 0.
pub fn fourier_tail_moments(k: f64, kmax: f64) -> [f64; 6] {
    let (sn, cs) = (k * kmax).sin_cos();
    let s1 = std::f64::consts::FRAC_PI_2 - sine_integral(k * kmax);
    let c2 = cs / kmax - k * s1;
    let s3 = sn / (2.0 * kmax * kmax) + k * c2 / 2.0;
    let c4 = cs / (3.0 * kmax.powi(3)) - k * s3 / 3.0;
    let s5 = sn / (4.0 * kmax.powi(4)) + k * c4 / 4.0;
    let c6 = cs / (5.0 * kmax.powi(5)) - k * s5 / 5.0;
    [s1, c2, s3, c4, s5, c6]
}
