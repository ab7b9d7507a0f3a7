//! Closed-form oracle for the attractive square well q(x) = -q₀ on [0, a].

use num_complex::Complex64;

use crate::model::{Grid, GridKind, Potential};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWell {
    pub depth: f64,
    pub width: f64,
}

/// Jost data of the well at one k.
#[derive(Debug, Clone, Copy)]
pub struct WellJost {
    pub f: Complex64,
    pub fprime0: Complex64,
    pub i_function: Complex64,
}

impl SquareWell {
    pub fn new(depth: f64, width: f64) -> Self {
        assert!(depth > 0.0 && width > 0.0, "square well needs q0 > 0 and a > 0");
        SquareWell { depth, width }
    }

    /// The well sampled on `n` uniform points of [0, a].
    pub fn potential(&self, n: usize) -> Potential {
        let grid = Grid::uniform(GridKind::Position, 0.0, self.width, n.max(2)).expect("valid grid");
        let values = vec![-self.depth; grid.len()];
        Potential::new(grid, values, self.width).expect("valid potential")
    }

    pub fn q(&self, x: f64) -> f64 {
        if x <= self.width {
            -self.depth
        } else {
            0.0
        }
    }

    /// f(k) = e^{ika}(cos κa − i(k/κ) sin κa), f'(0,k) = e^{ika}(ik cos κa + κ sin κa),
    /// κ = √(k² + q₀).
    pub fn jost(&self, k: Complex64) -> WellJost {
        let a = self.width;
        let kappa = (k * k + self.depth).sqrt();
        let (c, s) = ((kappa * a).cos(), (kappa * a).sin());
        let phase = (I * k * a).exp();
        let f = phase * (c - I * (k / kappa) * s);
        let fprime0 = phase * (I * k * c + kappa * s);
        WellJost {
            f,
            fprime0,
            i_function: fprime0 / f,
        }
    }

    /// f(iκ) as a real function of κ >= 0.
    pub fn jost_imaginary(&self, kappa: f64) -> f64 {
        self.jost(Complex64::new(0.0, kappa)).f.re
    }

    /// Number of Dirichlet bound states: √q₀·a ∈ ((2m−1)π/2, (2m+1)π/2) ⇒ m.
    pub fn bound_state_count(&self) -> usize {
        let t = self.depth.sqrt() * self.width;
        ((t / std::f64::consts::PI) + 0.5).floor() as usize
    }

    /// κ_j solving tan(κ_in a) = −κ_in/κ with κ_in = √(q₀ − κ²), by bisection
    /// between the branches of κ_in a ∈ ((2m−1)π/2, mπ).
    pub fn bound_states(&self) -> Vec<f64> {
        let a = self.width;
        let q0 = self.depth;
        // g(κ_in) = κ_in·cos(κ_in a) + κ·sin(κ_in a) with κ = √(q₀ − κ_in²)
        let g = |kin: f64| {
            let kap = (q0 - kin * kin).max(0.0).sqrt();
            kin * (kin * a).cos() + kap * (kin * a).sin()
        };
        let kin_max = q0.sqrt();
        let pi = std::f64::consts::PI;
        let mut out = Vec::new();
        for m in 1..=self.bound_state_count() {
            let lo = ((2 * m - 1) as f64 * pi / (2.0 * a)).min(kin_max);
            let hi = (m as f64 * pi / a).min(kin_max);
            let (mut lo, mut hi) = (lo, hi);
            let (glo, ghi) = (g(lo), g(hi));
            if glo == 0.0 {
                out.push((q0 - lo * lo).sqrt());
                continue;
            }
            if glo.signum() == ghi.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == glo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let kin = 0.5 * (lo + hi);
            out.push((q0 - kin * kin).sqrt());
        }
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }

    /// f(x, iκ) for 0 <= x <= a (real).
    pub fn jost_solution_imaginary(&self, kappa: f64, x: f64) -> f64 {
        let a = self.width;
        if x >= a {
            return (-kappa * x).exp();
        }
        let kin = (self.depth - kappa * kappa).sqrt();
        (-kappa * a).exp() * ((kin * (a - x)).cos() + (kappa / kin) * (kin * (a - x)).sin())
    }

    /// ∫₀^∞ f(x, iκ)² dx in closed form (κ² < q₀).
    pub fn jost_norm_squared(&self, kappa: f64) -> f64 {
        let a = self.width;
        let kin = (self.depth - kappa * kappa).sqrt();
        let r = kappa / kin;
        // ∫₀^a (cos t + r sin t)² dx with t = kin (a - x)
        let l = kin * a;
        let cos2 = 0.5 * (l + (2.0 * l).sin() / 2.0);
        let sin2 = 0.5 * (l - (2.0 * l).sin() / 2.0);
        let cross = 0.5 * (1.0 - (2.0 * l).cos());
        let inner = (cos2 + r * r * sin2 + r * cross) / kin;
        (-2.0 * kappa * a).exp() * inner + (-2.0 * kappa * a).exp() / (2.0 * kappa)
    }

    /// A(0,0) = ½∫q = −q₀a/2.
    pub fn a00(&self) -> f64 {
        -0.5 * self.depth * self.width
    }
}
