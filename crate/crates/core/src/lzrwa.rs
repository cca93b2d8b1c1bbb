//! Weak-coupling (rotating-wave) quantized Landau-Zener dynamics,
//! H = −τσ_z + g(a†σ₋ + aσ₊), solved in closed form.
//!
//! The Susskind-Glogower transform T = P₁ ⊗ 1 + P₀ ⊗ V maps every dressed
//! pair {|n,e⟩, |n+1,g⟩} onto a two-level Landau-Zener problem with coupling
//! g_n = g√(n+1), whose propagator is built from four 1F1 amplitudes. The
//! ground vacuum |0,g⟩ lies in the kernel of T and only picks up the phase
//! e^{−i(τ₁²−τ₀²)/2}.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cfun::{hyp1f1_with, Hyp1F1Config, Hyp1F1Params};
use crate::error::{Error, Result};
use crate::state::{JointState, Qubit, NORMALIZATION_TOL};

/// Evolution output must stay normalized to this tolerance.
pub const NORM_TOL: f64 = 1e-8;
const GAMMA_FLOOR: f64 = 1e-12;

/// Scaled-time run parameters. `g` is λ/v², times are τ = v²t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RwaParams {
    pub g: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub n_max: usize,
}

impl RwaParams {
    pub fn new(g: f64, tau0: f64, tau1: f64, n_max: usize) -> Result<Self> {
        let p = Self { g, tau0, tau1, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_coupling(self.g)?;
        if !(self.tau0.is_finite() && self.tau1.is_finite()) {
            return Err(Error::InvalidParameter("sweep times must be finite".into()));
        }
        if self.tau0 > self.tau1 {
            return Err(Error::InvalidParameter(format!(
                "tau0 = {} is after tau1 = {}",
                self.tau0, self.tau1
            )));
        }
        Ok(())
    }
}

fn check_coupling(g: f64) -> Result<()> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling g = {g} must be finite and ≥ 0")));
    }
    Ok(())
}

/// g_n = g√(n+1).
pub fn effective_coupling(g: f64, n: usize) -> f64 {
    g * ((n + 1) as f64).sqrt()
}

/// Even/odd amplitude solutions of one dressed sector at a single τ.
///
/// (c1e, c0o) solves the coupled system with data (1, 0) at τ = 0 and
/// (c1o, c0e) with data (0, 1), so the fundamental matrix is
/// [[c1e, c1o], [c0o, c0e]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorBasisSolutions {
    pub c1e: Complex64,
    pub c1o: Complex64,
    pub c0e: Complex64,
    pub c0o: Complex64,
}

impl SectorBasisSolutions {
    /// c0e·c1e − c0o·c1o; identically 1.
    pub fn wronskian(&self) -> Complex64 {
        self.c0e * self.c1e - self.c0o * self.c1o
    }
}

pub fn basis_solutions(g_n: f64, tau: f64) -> Result<SectorBasisSolutions> {
    basis_solutions_with(g_n, tau, &Hyp1F1Config::default())
}

pub fn basis_solutions_with(g_n: f64, tau: f64, config: &Hyp1F1Config) -> Result<SectorBasisSolutions> {
    check_coupling(g_n)?;
    if !tau.is_finite() {
        return Err(Error::InvalidParameter("tau must be finite".into()));
    }
    let tau_sq = tau * tau;
    let y = g_n * g_n / 4.0;
    let z = Complex64::new(0.0, tau_sq);
    let phase = Complex64::from_polar(1.0, -tau_sq / 2.0);
    let half = Complex64::new(0.5, 0.0);
    let three_halves = Complex64::new(1.5, 0.0);
    let f = |a: Complex64, b: Complex64| hyp1f1_with(Hyp1F1Params::new(a, b, z), config);

    let c1e = phase * f(Complex64::new(0.5, y), half)?;
    let c0e = phase * f(Complex64::new(0.0, y), half)?;
    let (c1o, c0o) = if g_n == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let odd = Complex64::new(0.0, -g_n * tau) * phase;
        (
            odd * f(Complex64::new(1.0, y), three_halves)?,
            odd * f(Complex64::new(0.5, y), three_halves)?,
        )
    };
    Ok(SectorBasisSolutions { c1e, c1o, c0e, c0o })
}

/// 2×2 propagator of dressed sector `n` in the ordered basis (|n,e⟩, |n+1,g⟩).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorPropagator {
    pub u: [[Complex64; 2]; 2],
    pub n: usize,
    pub tau0: f64,
    pub tau1: f64,
}

impl SectorPropagator {
    pub fn identity(n: usize, tau: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            u: [[one, zero], [zero, one]],
            n,
            tau0: tau,
            tau1: tau,
        }
    }

    /// Builds U(τ₁, τ₀) = u / γ from the basis solutions at both ends.
    pub fn from_solutions(
        n: usize,
        tau0: f64,
        start: &SectorBasisSolutions,
        tau1: f64,
        end: &SectorBasisSolutions,
    ) -> Result<Self> {
        let gamma = start.wronskian();
        if gamma.norm() < GAMMA_FLOOR {
            return Err(Error::SingularNormalization {
                magnitude: gamma.norm(),
            });
        }
        let u11 = start.c0e * end.c1e - start.c0o * end.c1o;
        let u12 = start.c1e * end.c1o - start.c1o * end.c1e;
        let u21 = start.c0e * end.c0o - start.c0o * end.c0e;
        let u22 = start.c1e * end.c0e - start.c1o * end.c0o;
        Ok(Self {
            u: [[u11 / gamma, u12 / gamma], [u21 / gamma, u22 / gamma]],
            n,
            tau0,
            tau1,
        })
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.u[0][0] * v[0] + self.u[0][1] * v[1],
            self.u[1][0] * v[0] + self.u[1][1] * v[1],
        ]
    }

    /// `self · earlier`, i.e. first `earlier` then `self`.
    pub fn after(&self, earlier: &SectorPropagator) -> SectorPropagator {
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in u.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.u[i][0] * earlier.u[0][j] + self.u[i][1] * earlier.u[1][j];
            }
        }
        SectorPropagator {
            u,
            n: self.n,
            tau0: earlier.tau0,
            tau1: self.tau1,
        }
    }

    /// max |(u†u − I)_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    s += self.u[k][i].conj() * self.u[k][j];
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn max_deviation(&self, other: &[[Complex64; 2]; 2]) -> f64 {
        self.u
            .iter()
            .flatten()
            .zip(other.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn sector_propagator(g: f64, n: usize, tau0: f64, tau1: f64) -> Result<SectorPropagator> {
    sector_propagator_with(g, n, tau0, tau1, &Hyp1F1Config::default())
}

pub fn sector_propagator_with(
    g: f64,
    n: usize,
    tau0: f64,
    tau1: f64,
    config: &Hyp1F1Config,
) -> Result<SectorPropagator> {
    check_coupling(g)?;
    let g_n = effective_coupling(g, n);
    let start = basis_solutions_with(g_n, tau0, config)?;
    let end = basis_solutions_with(g_n, tau1, config)?;
    SectorPropagator::from_solutions(n, tau0, &start, tau1, &end)
}

/// T = P₁ ⊗ 1 + P₀ ⊗ V: shifts the ground branch down one photon and
/// annihilates |0,g⟩.
pub fn apply_t(state: &JointState) -> JointState {
    let n_max = state.n_max();
    let mut out = JointState::zeros(n_max);
    for n in 0..=n_max {
        out.set(Qubit::Excited, n, state.get(Qubit::Excited, n));
        if n < n_max {
            out.set(Qubit::Ground, n, state.get(Qubit::Ground, n + 1));
        }
    }
    out
}

/// T† = P₁ ⊗ 1 + P₀ ⊗ V†: shifts the ground branch up one photon.
pub fn apply_t_dagger(state: &JointState) -> Result<JointState> {
    let n_max = state.n_max();
    if state.get(Qubit::Ground, n_max) != Complex64::new(0.0, 0.0) {
        return Err(Error::TruncationOverflow { n_max });
    }
    let mut out = JointState::zeros(n_max);
    for n in 0..=n_max {
        out.set(Qubit::Excited, n, state.get(Qubit::Excited, n));
        if n < n_max {
            out.set(Qubit::Ground, n + 1, state.get(Qubit::Ground, n));
        }
    }
    Ok(out)
}

/// Closed-form evolution of one initial state to arbitrary later times.
///
/// Basis solutions at τ₀ are computed once per occupied sector.
#[derive(Clone, Debug)]
pub struct RwaEvolver {
    g: f64,
    tau0: f64,
    config: Hyp1F1Config,
    vacuum: Complex64,
    transformed: JointState,
    starts: Vec<(usize, SectorBasisSolutions)>,
}

impl RwaEvolver {
    pub fn new(state0: &JointState, g: f64, tau0: f64, n_max: usize, config: Hyp1F1Config) -> Result<Self> {
        check_coupling(g)?;
        if !tau0.is_finite() {
            return Err(Error::InvalidParameter("tau0 must be finite".into()));
        }
        let state = state0.resized(n_max)?;
        let drift = (state.norm() - 1.0).abs();
        if drift > NORMALIZATION_TOL {
            return Err(Error::NormDrift { drift });
        }
        let transformed = apply_t(&state);
        let mut starts = Vec::new();
        for n in 0..=n_max {
            let pair = [transformed.get(Qubit::Excited, n), transformed.get(Qubit::Ground, n)];
            if pair.iter().any(|a| a.norm_sqr() > 0.0) {
                starts.push((n, basis_solutions_with(effective_coupling(g, n), tau0, &config)?));
            }
        }
        Ok(Self {
            g,
            tau0,
            config,
            vacuum: state.get(Qubit::Ground, 0),
            transformed,
            starts,
        })
    }

    /// U(τ, τ₀)|ψ₀⟩ = U₀ (Π₀₀ + T† U_LZ T)|ψ₀⟩.
    pub fn at(&self, tau: f64) -> Result<JointState> {
        if !tau.is_finite() {
            return Err(Error::InvalidParameter("tau must be finite".into()));
        }
        let n_max = self.transformed.n_max();
        let mut evolved = JointState::zeros(n_max);
        for (n, start) in &self.starts {
            let end = basis_solutions_with(effective_coupling(self.g, *n), tau, &self.config)?;
            let u = SectorPropagator::from_solutions(*n, self.tau0, start, tau, &end)?;
            let v = u.apply([
                self.transformed.get(Qubit::Excited, *n),
                self.transformed.get(Qubit::Ground, *n),
            ]);
            evolved.set(Qubit::Excited, *n, v[0]);
            evolved.set(Qubit::Ground, *n, v[1]);
        }
        let mut out = apply_t_dagger(&evolved)?;
        let phase = Complex64::from_polar(1.0, -(tau * tau - self.tau0 * self.tau0) / 2.0);
        out.set(Qubit::Ground, 0, self.vacuum * phase);
        let drift = (out.norm() - 1.0).abs();
        if drift > NORM_TOL {
            return Err(Error::NormDrift { drift });
        }
        Ok(out)
    }
}

pub fn evolve_rwa(state0: &JointState, p: &RwaParams) -> Result<JointState> {
    evolve_rwa_with(state0, p, &Hyp1F1Config::default())
}

pub fn evolve_rwa_with(state0: &JointState, p: &RwaParams, config: &Hyp1F1Config) -> Result<JointState> {
    p.validate()?;
    RwaEvolver::new(state0, p.g, p.tau0, p.n_max, *config)?.at(p.tau1)
}

/// States at each sample time, each propagated directly from τ₀.
pub fn rwa_trajectory(state0: &JointState, p: &RwaParams, samples: &[f64]) -> Result<Vec<(f64, JointState)>> {
    p.validate()?;
    let evolver = RwaEvolver::new(state0, p.g, p.tau0, p.n_max, Hyp1F1Config::default())?;
    samples.iter().map(|&tau| Ok((tau, evolver.at(tau)?))).collect()
}

/// ⟨σ_z⟩ = Σ_n |amp(e,n)|² − |amp(g,n)|².
pub fn population_difference(state: &JointState) -> f64 {
    state.level_population(Qubit::Excited) - state.level_population(Qubit::Ground)
}

/// Excited-state probability for the qubit starting in ground, swept
/// from τ₀ → −∞ to τ → +∞: 1 − e^{−πg_n²}.
pub fn pe_symmetric_asymptotic(g: f64, n: usize) -> f64 {
    let g_n = effective_coupling(g, n);
    -(-PI * g_n * g_n).exp_m1()
}

/// Excited-state probability for a sweep starting at the crossing τ₀ = 0
/// and running to τ → ∞: (1 ± e^{−πg_n²/2})/2.
pub fn pe_half_crossing(g: f64, n: usize, start_excited: bool) -> f64 {
    let g_n = effective_coupling(g, n);
    let damping = (-PI * g_n * g_n / 2.0).exp();
    if start_excited {
        (1.0 + damping) / 2.0
    } else {
        (1.0 - damping) / 2.0
    }
}

/// Excited-state probability at τ₁ for a qubit prepared in `start` inside
/// dressed sector `n` at τ₀, from the closed-form sector propagator.
pub fn sector_excited_probability(
    g: f64,
    n: usize,
    tau0: f64,
    tau1: f64,
    start: Qubit,
    config: &Hyp1F1Config,
) -> Result<f64> {
    let u = sector_propagator_with(g, n, tau0, tau1, config)?;
    let column = match start {
        Qubit::Excited => 0,
        Qubit::Ground => 1,
    };
    Ok(u.u[0][column].norm_sqr())
}
