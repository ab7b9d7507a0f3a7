//! Fixed-step RK4 with Richardson extrapolation for -u'' + q u = k² u.
//!
//! The state carries (u, u', ∫u²) so norms of real bound-state solutions come
//! out of the same pass at the same order of accuracy.

use num_complex::Complex64;

use crate::model::Potential;

pub(crate) type State = [Complex64; 3];

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Steps satisfy h <= factor / |k| (besides h <= node spacing).
    pub oscillation_factor: f64,
    /// Absolute cap on the step length.
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            oscillation_factor: 0.04,
            max_step: 0.01,
        }
    }
}

impl StepControl {
    fn step_for(&self, k: Complex64) -> f64 {
        let kk = k.norm().max(1e-12);
        (self.oscillation_factor / kk).min(self.max_step)
    }
}

#[inline]
fn rhs(qx: f64, k2: Complex64, y: &State) -> State {
    [y[1], (qx - k2) * y[0], y[0] * y[0]]
}

#[inline]
fn axpy(y: &State, h: f64, d: &State) -> State {
    [y[0] + d[0] * h, y[1] + d[1] * h, y[2] + d[2] * h]
}

/// Integrates one segment where q varies linearly from `q0` to `q1`.
fn segment(x0: f64, x1: f64, q0: f64, q1: f64, k2: Complex64, n: usize, mut y: State) -> State {
    let h = (x1 - x0) / n as f64;
    let slope = (q1 - q0) / (x1 - x0);
    let q_at = |x: f64| q0 + slope * (x - x0);
    for s in 0..n {
        let x = x0 + h * s as f64;
        let qa = q_at(x);
        let qm = q_at(x + 0.5 * h);
        let qb = q_at(x + h);
        let d1 = rhs(qa, k2, &y);
        let d2 = rhs(qm, k2, &axpy(&y, 0.5 * h, &d1));
        let d3 = rhs(qm, k2, &axpy(&y, 0.5 * h, &d2));
        let d4 = rhs(qb, k2, &axpy(&y, h, &d3));
        for c in 0..3 {
            y[c] += (d1[c] + d2[c] * 2.0 + d3[c] * 2.0 + d4[c]) * (h / 6.0);
        }
    }
    y
}

/// Exact propagation over a field-free segment of signed length `t`.
fn free_segment(t: f64, k: Complex64, y: State) -> State {
    let (c, sn) = ((k * t).cos(), (k * t).sin());
    let s = sn / k;
    let cc = t / 2.0 + (k * (2.0 * t)).sin() / (4.0 * k);
    let ss = (t / 2.0 - (k * (2.0 * t)).sin() / (4.0 * k)) / (k * k);
    let cs = sn * sn / (2.0 * k * k);
    [
        y[0] * c + y[1] * s,
        -y[0] * k * sn + y[1] * c,
        y[2] + y[0] * y[0] * cc + y[0] * y[1] * cs * 2.0 + y[1] * y[1] * ss,
    ]
}

/// Values of q just inside the open segment (x0, x1).
fn segment_potential(q: &Potential, x0: f64, x1: f64) -> (f64, f64) {
    let mid = 0.5 * (x0 + x1);
    if mid > q.support_end() {
        (0.0, 0.0)
    } else {
        let lo = x0.min(x1);
        let hi = x0.max(x1);
        let (a, b) = (q.eval(lo), q.eval(hi));
        if x0 <= x1 {
            (a, b)
        } else {
            (b, a)
        }
    }
}

fn sweep(q: &Potential, nodes: &[f64], y0: State, k: Complex64, h: f64, refine: usize) -> Vec<State> {
    let k2 = k * k;
    let mut out = Vec::with_capacity(nodes.len());
    let mut y = y0;
    out.push(y);
    for w in nodes.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let n = (((x1 - x0).abs() / h).ceil() as usize).max(1) * refine;
        let (q0, q1) = segment_potential(q, x0, x1);
        y = if q0 == 0.0 && q1 == 0.0 && (k * (x1 - x0)).norm() > 1e-2 {
            free_segment(x1 - x0, k, y)
        } else {
            segment(x0, x1, q0, q1, k2, n, y)
        };
        out.push(y);
    }
    out
}

/// States at every node, integrating from `nodes[0]` (where the state is
/// `y0`) through the remaining nodes in order. Steps of size h and h/2 are
/// combined by Richardson extrapolation.
pub(crate) fn propagate(q: &Potential, nodes: &[f64], y0: State, k: Complex64, ctl: StepControl) -> Vec<State> {
    let h = ctl.step_for(k);
    let coarse = sweep(q, nodes, y0, k, h, 1);
    let fine = sweep(q, nodes, y0, k, h, 2);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let mut r = [Complex64::new(0.0, 0.0); 3];
            for i in 0..3 {
                r[i] = (f[i] * 16.0 - c[i]) / 15.0;
            }
            r
        })
        .collect()
}

/// Sorted union of the potential's breakpoints within [0, end] and `extra`.
pub(crate) fn breakpoints(q: &Potential, end: f64, extra: &[f64]) -> Vec<f64> {
    let mut nodes: Vec<f64> = q
        .grid()
        .points()
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < end)
        .chain(extra.iter().copied().filter(|&x| x > 0.0 && x < end))
        .chain([0.0, end, q.support_end()].into_iter().filter(|&x| x <= end))
        .collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));
    nodes
}
