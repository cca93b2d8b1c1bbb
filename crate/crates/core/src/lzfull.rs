//! Strong-coupling dynamics of H = τσ_z + a†a + g(a + a†)σ_x.
//!
//! The parity transform R = exp(−iπ(σ_x − 1)a†a/2) is the identity on even
//! photon sectors and σ_x on odd ones. It makes the Hamiltonian diagonal in
//! the qubit: H_R = τσ_z(−1)^{a†a} + a†a + g(a + a†). Removing the diagonal
//! part as a pure phase, θ_{x,n}(τ) = s_x(−1)^n τ²/2 + nτ with s_x the σ_z
//! eigenvalue of branch x, leaves two decoupled tridiagonal chains
//!
//!   i ċ_{x,n} = e^{i s_x (−1)^n τ²} g (√n e^{iτ} c_{x,n−1} + √(n+1) e^{−iτ} c_{x,n+1}),
//!
//! truncated at n_max by dropping the upward coupling of the last row.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, StepStats};
use crate::state::{JointState, Qubit, NORMALIZATION_TOL};

/// Top-sector population above which a run is flagged as under-truncated.
pub const TRUNCATION_WARNING: f64 = 1e-6;
/// Allowed norm drift along a trajectory.
pub const NORM_DRIFT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullParams {
    pub g: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub n_max: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for FullParams {
    fn default() -> Self {
        Self {
            g: 0.1,
            tau0: 1.0,
            tau1: 11.0,
            n_max: 100,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

impl FullParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParameter(format!("coupling g = {} must be ≥ 0", self.g)));
        }
        if !(self.tau0.is_finite() && self.tau1.is_finite()) || self.tau1 < self.tau0 {
            return Err(Error::InvalidParameter(format!(
                "need finite tau0 ≤ tau1, got ({}, {})",
                self.tau0, self.tau1
            )));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame {
    Lab,
    Parity,
    /// Parity frame with the diagonal phases θ_{x,n}(τ) removed.
    ParityRotating { tau: f64 },
}

impl Frame {
    fn name(&self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Parity => "parity",
            Frame::ParityRotating { .. } => "parity-rotating",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformedState {
    pub frame: Frame,
    pub amps: JointState,
}

impl TransformedState {
    pub fn lab(state: JointState) -> Self {
        Self {
            frame: Frame::Lab,
            amps: state,
        }
    }

    fn expect(&self, expected: &'static str, ok: bool) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected,
                found: self.frame.name(),
            })
        }
    }
}

/// Applies R (lab → parity) or R† (parity → lab). R is σ_x on odd sectors.
pub fn parity_transform(state: &TransformedState, inverse: bool) -> Result<TransformedState> {
    let (from, to) = if inverse {
        (Frame::Parity, Frame::Lab)
    } else {
        (Frame::Lab, Frame::Parity)
    };
    state.expect(from.name(), state.frame == from)?;
    let mut amps = state.amps.clone();
    for n in (1..=amps.n_max()).step_by(2) {
        let g = amps.get(Qubit::Ground, n);
        let e = amps.get(Qubit::Excited, n);
        amps.set(Qubit::Ground, n, e);
        amps.set(Qubit::Excited, n, g);
    }
    Ok(TransformedState { frame: to, amps })
}

fn frame_phase(qubit: Qubit, n: usize, tau: f64) -> f64 {
    let staggered = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    qubit.sigma_z() * staggered * tau * tau / 2.0 + n as f64 * tau
}

/// Parity frame → rotating frame at τ: c = e^{iθ(τ)} φ.
pub fn to_rotating(state: &TransformedState, tau: f64) -> Result<TransformedState> {
    state.expect("parity", state.frame == Frame::Parity)?;
    let mut amps = state.amps.clone();
    for q in Qubit::BOTH {
        for n in 0..=amps.n_max() {
            let v = amps.get(q, n) * Complex64::from_polar(1.0, frame_phase(q, n, tau));
            amps.set(q, n, v);
        }
    }
    Ok(TransformedState {
        frame: Frame::ParityRotating { tau },
        amps,
    })
}

/// Rotating frame → parity frame: φ = e^{−iθ(τ)} c.
pub fn from_rotating(state: &TransformedState) -> Result<TransformedState> {
    let Frame::ParityRotating { tau } = state.frame else {
        return Err(Error::FrameMismatch {
            expected: "parity-rotating",
            found: state.frame.name(),
        });
    };
    let mut amps = state.amps.clone();
    for q in Qubit::BOTH {
        for n in 0..=amps.n_max() {
            let v = amps.get(q, n) * Complex64::from_polar(1.0, -frame_phase(q, n, tau));
            amps.set(q, n, v);
        }
    }
    Ok(TransformedState {
        frame: Frame::Parity,
        amps,
    })
}

/// Right-hand side of the rotating-frame chain equations.
pub(crate) struct ChainRhs {
    g: f64,
    n_max: usize,
    sqrt_n: Vec<f64>,
}

impl ChainRhs {
    pub(crate) fn new(g: f64, n_max: usize) -> Self {
        Self {
            g,
            n_max,
            sqrt_n: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    pub(crate) fn eval(&self, tau: f64, c: &[Complex64], dc: &mut [Complex64]) {
        let stride = self.n_max + 1;
        let up = Complex64::from_polar(self.g, tau); // g e^{iτ}
        let down = up.conj(); // g e^{−iτ}
        let chirp = Complex64::from_polar(1.0, tau * tau);
        let minus_i = Complex64::new(0.0, -1.0);
        for q in Qubit::BOTH {
            let base = q.index() * stride;
            let s = q.sigma_z();
            for n in 0..=self.n_max {
                let mut acc = Complex64::new(0.0, 0.0);
                if n > 0 {
                    acc += self.sqrt_n[n] * up * c[base + n - 1];
                }
                if n < self.n_max {
                    acc += self.sqrt_n[n + 1] * down * c[base + n + 1];
                }
                let positive = (s > 0.0) == (n % 2 == 0);
                let phase = if positive { chirp } else { chirp.conj() };
                dc[base + n] = minus_i * phase * acc;
            }
        }
    }
}

/// dc/dτ for a state in the parity-rotating frame.
pub fn rhs(tau: f64, state: &TransformedState, g: f64) -> Result<Vec<Complex64>> {
    state.expect("parity-rotating", matches!(state.frame, Frame::ParityRotating { .. }))?;
    let rhs = ChainRhs::new(g, state.amps.n_max());
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.dim()];
    rhs.eval(tau, state.amps.amplitudes(), &mut out);
    Ok(out)
}

/// Σ_n (−1)^n (|amp(e,n)|² − |amp(g,n)|²): σ_z cos(πa†a) evaluated on a
/// parity-frame (or parity-rotating) state, which is the lab-frame ⟨σ_z⟩.
pub fn population_difference_full(state: &TransformedState) -> f64 {
    debug_assert!(state.frame != Frame::Lab);
    let a = &state.amps;
    (0..=a.n_max())
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * (a.population(Qubit::Excited, n) - a.population(Qubit::Ground, n))
        })
        .sum()
}

/// ⟨σ_z⟩ in the transformed frame, i.e. the lab-frame parity (−1)^{a†a}σ_z.
pub fn parity_expectation(state: &TransformedState) -> f64 {
    state.amps.level_population(Qubit::Excited) - state.amps.level_population(Qubit::Ground)
}

#[derive(Clone, Debug)]
pub struct FullSample {
    pub tau: f64,
    /// Parity-frame state.
    pub state: TransformedState,
}

#[derive(Clone, Debug)]
pub struct FullTrajectory {
    pub samples: Vec<FullSample>,
    pub n_max: usize,
    pub max_top_population: f64,
    pub max_norm_drift: f64,
    pub truncation_warning: bool,
    pub stats: StepStats,
}

/// `count` evenly spaced points over [start, end].
pub fn uniform_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k + 1 == count {
                    end
                } else {
                    start + (end - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Step ceiling that resolves the e^{±iτ²} chirp.
fn step_ceiling(tau: f64) -> f64 {
    0.1 / tau.abs().max(1.0)
}

/// Integrates a lab-frame initial state from τ₀ and returns parity-frame
/// states at `samples` (which must lie in [τ₀, τ₁], ascending).
pub fn integrate_full(state0: &JointState, p: &FullParams, samples: &[f64]) -> Result<FullTrajectory> {
    p.validate()?;
    if samples.iter().any(|&t| t < p.tau0 || t > p.tau1) {
        return Err(Error::InvalidParameter(format!(
            "sample times must lie in [{}, {}]",
            p.tau0, p.tau1
        )));
    }
    let lab = state0.resized(p.n_max)?;
    let drift = (lab.norm() - 1.0).abs();
    if drift > NORMALIZATION_TOL {
        return Err(Error::NormDrift { drift });
    }
    let parity = parity_transform(&TransformedState::lab(lab), false)?;
    let rotating = to_rotating(&parity, p.tau0)?;

    let chain = ChainRhs::new(p.g, p.n_max);
    let solver = Dopri5::new(p.rel_tol, p.abs_tol);
    let stride = p.n_max + 1;
    let top = |c: &[Complex64]| c[p.n_max].norm_sqr() + c[stride + p.n_max].norm_sqr();
    let norm = |c: &[Complex64]| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

    let c0 = rotating.amps.amplitudes();
    let mut max_top = top(c0);
    let mut max_drift = (norm(c0) - 1.0).abs();
    let (states, stats) = solver.integrate(
        |t, c, dc| chain.eval(t, c, dc),
        p.tau0,
        c0,
        samples,
        step_ceiling,
        |_, c| {
            max_top = max_top.max(top(c));
            max_drift = max_drift.max((norm(c) - 1.0).abs());
        },
    )?;
    if max_drift > NORM_DRIFT_TOL {
        return Err(Error::NormDrift { drift: max_drift });
    }
    let samples = samples
        .iter()
        .zip(states)
        .map(|(&tau, amps)| {
            let rot = TransformedState {
                frame: Frame::ParityRotating { tau },
                amps: JointState::from_raw(p.n_max, amps)?,
            };
            Ok(FullSample {
                tau,
                state: from_rotating(&rot)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FullTrajectory {
        samples,
        n_max: p.n_max,
        max_top_population: max_top,
        max_norm_drift: max_drift,
        truncation_warning: max_top > TRUNCATION_WARNING,
        stats,
    })
}

/// Repeats [`integrate_full`] with doubled n_max until the top-sector
/// population stays below `target`, up to `n_max_cap`.
pub fn integrate_full_auto(
    state0: &JointState,
    p: &FullParams,
    samples: &[f64],
    target: f64,
    n_max_cap: usize,
) -> Result<FullTrajectory> {
    let mut params = *p;
    loop {
        let traj = integrate_full(state0, &params, samples)?;
        if traj.max_top_population < target {
            return Ok(traj);
        }
        if params.n_max >= n_max_cap {
            return Err(Error::TruncationEscalation {
                n_max: params.n_max,
                population: traj.max_top_population,
            });
        }
        params.n_max = (params.n_max * 2).min(n_max_cap);
    }
}

/// Back-transforms a parity-frame sample to the lab frame.
pub fn to_lab(state: &TransformedState) -> Result<JointState> {
    Ok(parity_transform(state, true)?.amps)
}
