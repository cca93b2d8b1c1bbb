//! Dormand-Prince 5(4) integrator for complex state vectors, with PI step
//! control, a caller-supplied step ceiling, and dense output at sample times.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const MAX_GROWTH: f64 = 10.0;
const MAX_SHRINK: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy_combination(out: &mut [Complex64], y: &[Complex64], h: f64, coeffs: &[f64], ks: &[Vec<Complex64>]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in coeffs.iter().zip(ks) {
            if *c != 0.0 {
                acc += *c * k[i];
            }
        }
        *o = y[i] + h * acc;
    }
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    /// Integrates `y' = rhs(t, y)` from `(t0, y0)` and returns the state at
    /// every entry of `samples`, which must be ordered in the direction of
    /// integration starting at or after `t0`. `observer` sees every accepted
    /// step; `step_ceiling(t)` bounds |h| near `t`.
    pub fn integrate<F, H, O>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: &[Complex64],
        samples: &[f64],
        step_ceiling: H,
        mut observer: O,
    ) -> Result<(Vec<Vec<Complex64>>, StepStats)>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
        H: Fn(f64) -> f64,
        O: FnMut(f64, &[Complex64]),
    {
        let dim = y0.len();
        let mut out = Vec::with_capacity(samples.len());
        let mut stats = StepStats::default();
        let Some(&t_end) = samples.last() else {
            return Ok((out, stats));
        };
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        if samples.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (samples[0] - t0) * dir < 0.0 {
            return Err(Error::InvalidParameter(
                "sample times must be ordered along the integration direction".into(),
            ));
        }
        let mut next_sample = 0;
        while next_sample < samples.len() && samples[next_sample] == t0 {
            out.push(y0.to_vec());
            next_sample += 1;
        }
        if next_sample == samples.len() {
            return Ok((out, stats));
        }

        let zero = Complex64::new(0.0, 0.0);
        let mut ks: Vec<Vec<Complex64>> = vec![vec![zero; dim]; 7];
        let mut stage = vec![zero; dim];
        let mut y_new = vec![zero; dim];
        let mut cont: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![zero; dim]);
        let mut y = y0.to_vec();
        let mut t = t0;

        rhs(t, &y, &mut ks[0]);
        let mut h = self.initial_step(&y, &ks[0], (t_end - t0).abs()).min(step_ceiling(t));
        let mut fac_old: f64 = 1e-4;
        let expo = 0.2 - BETA * 0.75;

        while (t_end - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::MaxSteps {
                    steps: self.max_steps,
                });
            }
            h = h.min(step_ceiling(t)).min((t_end - t).abs());
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { tau: t, step: h });
            }
            let hs = h * dir;
            for s in 1..7 {
                let (prev, rest) = ks.split_at_mut(s);
                axpy_combination(&mut stage, &y, hs, &A[s][..s], prev);
                rhs(t + C[s] * hs, &stage, &mut rest[0]);
            }
            // stage 7 row equals the fifth-order weights, so `stage` is y_new
            y_new.copy_from_slice(&stage);

            let mut err_sq = 0.0;
            for i in 0..dim {
                let mut e = zero;
                for (s, coeff) in E.iter().enumerate() {
                    if *coeff != 0.0 {
                        e += *coeff * ks[s][i];
                    }
                }
                let scale = self.abs_tol + self.rel_tol * y[i].norm().max(y_new[i].norm());
                err_sq += ((hs * e).norm() / scale).powi(2);
            }
            let err = (err_sq / dim.max(1) as f64).sqrt();

            if err <= 1.0 {
                stats.accepted += 1;
                for i in 0..dim {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * ks[0][i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - hs * ks[6][i] - bspl;
                    let mut d = zero;
                    for (s, coeff) in D.iter().enumerate() {
                        if *coeff != 0.0 {
                            d += *coeff * ks[s][i];
                        }
                    }
                    cont[4][i] = hs * d;
                }
                let t_new = if (t_end - (t + hs)).abs() <= 1e-15 * t_end.abs().max(1.0) {
                    t_end
                } else {
                    t + hs
                };
                while next_sample < samples.len() && (samples[next_sample] - t_new) * dir <= 0.0 {
                    let theta = (samples[next_sample] - t) / hs;
                    let th1 = 1.0 - theta;
                    let state: Vec<Complex64> = (0..dim)
                        .map(|i| {
                            cont[0][i]
                                + theta
                                    * (cont[1][i]
                                        + th1 * (cont[2][i] + theta * (cont[3][i] + th1 * cont[4][i])))
                        })
                        .collect();
                    out.push(state);
                    next_sample += 1;
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                observer(t, &y);
                let (first, last) = ks.split_at_mut(6);
                std::mem::swap(&mut first[0], &mut last[0]);

                let err_c = err.max(1e-10);
                let fac = (err_c.powf(expo) / fac_old.powf(BETA) / SAFETY).clamp(1.0 / MAX_GROWTH, 1.0 / MAX_SHRINK);
                fac_old = err.max(1e-4);
                h /= fac;
            } else {
                stats.rejected += 1;
                let fac = (err.powf(expo) / SAFETY).min(1.0 / MAX_SHRINK);
                h /= fac.max(1.0);
            }
        }
        while next_sample < samples.len() {
            out.push(y.clone());
            next_sample += 1;
        }
        Ok((out, stats))
    }

    fn initial_step(&self, y: &[Complex64], f: &[Complex64], span: f64) -> f64 {
        let scale = |i: usize| self.abs_tol + self.rel_tol * y[i].norm();
        let n = y.len().max(1) as f64;
        let d0 = (y.iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (f.iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span).max(1e-12)
    }
}
