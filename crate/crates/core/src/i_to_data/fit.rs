//! Sums of decaying exponentials from uniform samples: matrix pencil for the
//! model order and starting rates, Levenberg–Marquardt for the final fit.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

/// One term A e^{−κt} of the fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialTerm {
    pub kappa: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    /// Singular values below this fraction of the largest are dropped.
    pub relative_gap: f64,
    /// Terms whose RMS over the window is below this are treated as noise.
    pub energy_threshold: f64,
    /// Terms whose RMS is below this multiple of the fit misfit are treated as noise.
    pub significance: f64,
    /// Rates below this are read as the constant term.
    pub origin_kappa: f64,
    /// Largest acceptable RMS misfit.
    pub residual_limit: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            t_start: 0.5,
            t_end: 10.0,
            samples: 191,
            relative_gap: 1e-4,
            energy_threshold: 1e-5,
            significance: 3.0,
            origin_kappa: 0.02,
            residual_limit: 1e-4,
        }
    }
}

impl FitOptions {
    pub fn times(&self) -> Vec<f64> {
        let dt = (self.t_end - self.t_start) / (self.samples - 1) as f64;
        (0..self.samples).map(|n| self.t_start + dt * n as f64).collect()
    }
}

fn rms(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

/// Starting rates from the matrix pencil of the Hankel matrix of `y`.
fn pencil_rates(times: &[f64], y: &[f64], opts: &FitOptions) -> Vec<f64> {
    let n = y.len();
    let l = n / 3;
    let rows = n - l;
    let h = DMatrix::from_fn(rows, l + 1, |i, j| y[i + j]);
    let svd = h.svd(false, true);
    let v_t = svd.v_t.expect("requested right vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite")
    });
    let top = svd.singular_values[order[0]];
    // a term of RMS ε contributes a singular value of about ε√(rows·cols)
    let floor = opts.energy_threshold * ((rows * (l + 1)) as f64).sqrt();
    let m = order
        .iter()
        .take_while(|&&i| {
            let s = svd.singular_values[i];
            s > opts.relative_gap * top && s > floor
        })
        .count();
    if m == 0 {
        return Vec::new();
    }
    let v = DMatrix::from_fn(l + 1, m, |r, c| v_t[(order[c], r)]);
    let v1 = v.rows(0, l).into_owned();
    let v2 = v.rows(1, l).into_owned();
    let Ok(pinv) = v1.pseudo_inverse(1e-12) else {
        return Vec::new();
    };
    let a = pinv * v2;
    let dt = times[1] - times[0];
    a.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-6_f64.max(1e-3 * z.re.abs()) && z.re > 0.0)
        .map(|z| -z.re.ln() / dt)
        .filter(|k| *k > -1e-3)
        .map(|k| k.max(0.0))
        .collect()
}

/// Least-squares amplitudes for fixed rates.
fn amplitudes(times: &[f64], y: &[f64], kappas: &[f64]) -> Option<Vec<f64>> {
    let phi = DMatrix::from_fn(times.len(), kappas.len(), |n, m| (-kappas[m] * times[n]).exp());
    let rhs = DVector::from_column_slice(y);
    let svd = phi.svd(true, true);
    svd.solve(&rhs, 1e-14).ok().map(|x| x.iter().copied().collect())
}

/// Levenberg–Marquardt on (κ, A); rates flagged as constant stay at 0.
fn refine(times: &[f64], y: &[f64], kappas: &[f64], fixed: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let m = kappas.len();
    let mut kap = kappas.to_vec();
    let mut amp = amplitudes(times, y, &kap).unwrap_or_else(|| vec![0.0; m]);
    let residual = |kap: &[f64], amp: &[f64]| -> Vec<f64> {
        times
            .iter()
            .zip(y)
            .map(|(&t, &yv)| yv - kap.iter().zip(amp).map(|(k, a)| a * (-k * t).exp()).sum::<f64>())
            .collect()
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let mut r = residual(&kap, &amp);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let jac = DMatrix::from_fn(times.len(), 2 * m, |n, p| {
            let t = times[n];
            if p < m {
                if fixed[p] {
                    0.0
                } else {
                    -t * amp[p] * (-kap[p] * t).exp()
                }
            } else {
                (-kap[p - m] * t).exp()
            }
        });
        let jt = jac.transpose();
        let mut jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        for d in 0..2 * m {
            let diag = jtj[(d, d)];
            jtj[(d, d)] = diag + lambda * diag.max(1e-30);
        }
        let Some(step) = jtj.clone().lu().solve(&g) else {
            break;
        };
        let trial_k: Vec<f64> = (0..m)
            .map(|i| if fixed[i] { 0.0 } else { (kap[i] + step[i]).max(0.0) })
            .collect();
        let trial_a: Vec<f64> = (0..m).map(|i| amp[i] + step[m + i]).collect();
        let tr = residual(&trial_k, &trial_a);
        let tc = cost(&tr);
        if tc < c {
            let gain = (c - tc) / c.max(1e-300);
            kap = trial_k;
            amp = trial_a;
            r = tr;
            c = tc;
            lambda = (lambda * 0.3).max(1e-12);
            if gain < 1e-14 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (kap, amp)
}

/// Fits y ≈ Σ A_m e^{−κ_m t}; returns the terms (κ descending) and the RMS misfit.
pub(crate) fn fit_exponentials(times: &[f64], y: &[f64], opts: &FitOptions) -> Result<(Vec<ExponentialTerm>, f64)> {
    let n = y.len();
    let mut kappas = pencil_rates(times, y, opts);
    let mut terms = Vec::new();
    while !kappas.is_empty() {
        let fixed: Vec<bool> = kappas.iter().map(|&k| k < opts.origin_kappa).collect();
        let start: Vec<f64> = kappas
            .iter()
            .zip(&fixed)
            .map(|(&k, &f)| if f { 0.0 } else { k })
            .collect();
        let (k, a) = refine(times, y, &start, &fixed);
        let energies: Vec<f64> = k
            .iter()
            .zip(&a)
            .map(|(&kk, &aa)| rms(times.iter().map(|&t| aa * (-kk * t).exp()), n))
            .collect();
        let misfit = rms(
            times
                .iter()
                .zip(y)
                .map(|(&t, &yv)| yv - k.iter().zip(&a).map(|(&kk, &aa)| aa * (-kk * t).exp()).sum::<f64>()),
            n,
        );
        let floor = opts.energy_threshold.max(opts.significance * misfit);
        let keep: Vec<usize> = (0..k.len()).filter(|&i| energies[i] >= floor).collect();
        if keep.len() == k.len() {
            terms = k
                .iter()
                .zip(&a)
                .map(|(&kappa, &amplitude)| ExponentialTerm { kappa, amplitude })
                .collect();
            break;
        }
        kappas = keep.iter().map(|&i| k[i]).collect();
    }
    terms.sort_by(|a, b| b.kappa.partial_cmp(&a.kappa).expect("finite"));
    let misfit = rms(
        times
            .iter()
            .zip(y)
            .map(|(&t, &yv)| yv - terms.iter().map(|e| e.amplitude * (-e.kappa * t).exp()).sum::<f64>()),
        n,
    );
    if misfit > opts.residual_limit {
        return Err(Error::Fit {
            residual: misfit,
            threshold: opts.residual_limit,
            context: "exponential fit of the pole transform (K_max too small or noisy I?)".into(),
        });
    }
    Ok((terms, misfit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_two_exponentials_and_a_constant() {
        let opts = FitOptions::default();
        let t = opts.times();
        let y: Vec<f64> = t
            .iter()
            .map(|&t| 0.7 * (-2.3 * t).exp() + 0.2 * (-0.6 * t).exp() + 0.05)
            .collect();
        let (terms, misfit) = fit_exponentials(&t, &y, &opts).unwrap();
        assert_eq!(terms.len(), 3);
        assert_abs_diff_eq!(terms[0].kappa, 2.3, epsilon = 1e-8);
        assert_abs_diff_eq!(terms[0].amplitude, 0.7, epsilon = 1e-8);
        assert_abs_diff_eq!(terms[1].kappa, 0.6, epsilon = 1e-8);
        assert_eq!(terms[2].kappa, 0.0);
        assert_abs_diff_eq!(terms[2].amplitude, 0.05, epsilon = 1e-8);
        assert!(misfit < 1e-10);
    }

    #[test]
    fn noise_below_threshold_gives_no_terms() {
        let opts = FitOptions::default();
        let t = opts.times();
        let y: Vec<f64> = t.iter().map(|&t| 1e-7 * (37.0 * t).sin()).collect();
        let (terms, _) = fit_exponentials(&t, &y, &opts).unwrap();
        assert!(terms.is_empty());
        let zeros = vec![0.0; t.len()];
        assert!(fit_exponentials(&t, &zeros, &opts).unwrap().0.is_empty());
    }

    #[test]
    fn terms_at_the_noise_level_are_dropped() {
        let opts = FitOptions::default();
        let t = opts.times();
        let y: Vec<f64> = t
            .iter()
            .map(|&t| 0.5 * (-1.5 * t).exp() + 2e-5 * (9.0 * t).sin())
            .collect();
        let (terms, misfit) = fit_exponentials(&t, &y, &opts).unwrap();
        assert_eq!(terms.len(), 1, "{terms:?}");
        assert_abs_diff_eq!(terms[0].kappa, 1.5, epsilon = 1e-3);
        assert!(misfit < 3e-5);
    }
}
