//! Brute-force propagation of the truncated lab-frame Hamiltonians.
//!
//! Both models are affine in the sweep variable, H(τ) = H_fixed + τ·D, and
//! real symmetric in the |x, n⟩ basis. A step of length Δ applies the
//! fourth-order commutator-free Magnus pair
//! exp(−iΔ/2·H(τ_mid + Δ/3)) · exp(−iΔ/2·H(τ_mid − Δ/3)); each exponential
//! acts on the state through a Lanczos basis in which the small tridiagonal
//! projection is diagonalized, so every step is unitary to rounding.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{JointState, Qubit, NORMALIZATION_TOL};

/// Largest amplitude change tolerated when the step count is doubled.
pub const SELF_CONVERGENCE_TOL: f64 = 1e-8;
const KRYLOV_TOL: f64 = 1e-14;
const KRYLOV_MAX_DIM: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// −τσ_z + g(a†σ₋ + aσ₊), τ = v²t in units of ħω₀.
    Rwa,
    /// τσ_z + a†a + g(a + a†)σ_x, τ = u²t in units of ħω.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenseHamiltonianSpec {
    pub model: Model,
    pub g: f64,
    pub n_max: usize,
}

impl DenseHamiltonianSpec {
    pub fn new(model: Model, g: f64, n_max: usize) -> Self {
        Self { model, g, n_max }
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn time_convention(&self) -> &'static str {
        match self.model {
            Model::Rwa => "tau = v^2 t, energies in units of hbar*omega0",
            Model::Full => "tau = u^2 t, energies in units of hbar*omega",
        }
    }

    fn idx(&self, q: Qubit, n: usize) -> usize {
        q.index() * (self.n_max + 1) + n
    }

    fn parts(&self) -> AffineHamiltonian {
        let dim = self.dim();
        let mut fixed: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut sweep = vec![0.0; dim];
        let mut couple = |i: usize, j: usize, v: f64| {
            fixed[i].push((j, v));
            fixed[j].push((i, v));
        };
        match self.model {
            Model::Rwa => {
                for n in 0..self.n_max {
                    let v = self.g * ((n + 1) as f64).sqrt();
                    couple(self.idx(Qubit::Excited, n), self.idx(Qubit::Ground, n + 1), v);
                }
            }
            Model::Full => {
                for n in 0..self.n_max {
                    let v = self.g * ((n + 1) as f64).sqrt();
                    couple(self.idx(Qubit::Excited, n), self.idx(Qubit::Ground, n + 1), v);
                    couple(self.idx(Qubit::Ground, n), self.idx(Qubit::Excited, n + 1), v);
                }
            }
        }
        let sign = match self.model {
            Model::Rwa => -1.0,
            Model::Full => 1.0,
        };
        for q in Qubit::BOTH {
            for n in 0..=self.n_max {
                let i = self.idx(q, n);
                sweep[i] = sign * q.sigma_z();
                if self.model == Model::Full {
                    fixed[i].push((i, n as f64));
                }
            }
        }
        AffineHamiltonian { fixed, sweep }
    }

    /// H(τ) as a dense Hermitian matrix.
    pub fn matrix(&self, tau: f64) -> DMatrix<Complex64> {
        let parts = self.parts();
        let mut m = DMatrix::<Complex64>::zeros(self.dim(), self.dim());
        for (i, row) in parts.fixed.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += Complex64::new(v, 0.0);
            }
            m[(i, i)] += Complex64::new(tau * parts.sweep[i], 0.0);
        }
        m
    }
}

/// H(τ) = fixed + τ·diag(sweep), stored by rows.
struct AffineHamiltonian {
    fixed: Vec<Vec<(usize, f64)>>,
    sweep: Vec<f64>,
}

impl AffineHamiltonian {
    fn apply(&self, tau: f64, v: &[Complex64], out: &mut [Complex64]) {
        for (i, row) in self.fixed.iter().enumerate() {
            let mut acc = tau * self.sweep[i] * v[i];
            for &(j, h) in row {
                acc += h * v[j];
            }
            out[i] = acc;
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// exp(−i dt T) e₁ for the real symmetric tridiagonal T(alpha, beta).
fn small_exponential(alpha: &[f64], beta: &[f64], dt: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| {
                    eig.eigenvectors[(k, l)]
                        * eig.eigenvectors[(0, l)]
                        * Complex64::from_polar(1.0, -dt * eig.eigenvalues[l])
                })
                .sum()
        })
        .collect()
}

/// v ← exp(−i dt H(tau)) v through a Lanczos projection; halves dt when
/// the Krylov space would need more than `KRYLOV_MAX_DIM` vectors.
fn krylov_exp(h: &AffineHamiltonian, tau: f64, dt: f64, v: &mut [Complex64]) {
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return;
    }
    let dim = v.len();
    let max_m = KRYLOV_MAX_DIM.min(dim);
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    loop {
        let j = basis.len() - 1;
        h.apply(tau, &basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for q in &basis {
            let proj = dot(q, &w);
            w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= proj * qi);
        }
        let b = norm(&w);
        let scale = a.abs() + beta.last().copied().unwrap_or(0.0) + 1.0;
        let breakdown = b <= 1e-13 * scale;
        let m = alpha.len();
        if breakdown || m == max_m || m.is_multiple_of(4) {
            let y = small_exponential(&alpha, &beta, dt);
            let err = if breakdown { 0.0 } else { b * dt.abs() * y[m - 1].norm() };
            if breakdown || err < KRYLOV_TOL {
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = beta0 * basis.iter().zip(&y).map(|(q, yk)| q[i] * yk).sum::<Complex64>();
                }
                return;
            }
            if m == max_m {
                krylov_exp(h, tau, dt / 2.0, v);
                krylov_exp(h, tau, dt / 2.0, v);
                return;
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

fn check_state(spec: &DenseHamiltonianSpec, state0: &JointState) -> Result<JointState> {
    let state = state0.resized(spec.n_max)?;
    let drift = (state.norm() - 1.0).abs();
    if drift > NORMALIZATION_TOL {
        return Err(Error::NormDrift { drift });
    }
    if !spec.g.is_finite() {
        return Err(Error::InvalidParameter("coupling must be finite".into()));
    }
    Ok(state)
}

fn advance(h: &AffineHamiltonian, v: &mut [Complex64], tau0: f64, tau1: f64, n_steps: usize) {
    let dt = (tau1 - tau0) / n_steps as f64;
    for k in 0..n_steps {
        let mid = tau0 + (k as f64 + 0.5) * dt;
        krylov_exp(h, mid - dt / 3.0, dt / 2.0, v);
        krylov_exp(h, mid + dt / 3.0, dt / 2.0, v);
    }
}

/// Fixed-resolution propagation from τ₀ to τ₁ in `n_steps` steps.
pub fn dense_propagate_fixed(
    spec: &DenseHamiltonianSpec,
    state0: &JointState,
    tau0: f64,
    tau1: f64,
    n_steps: usize,
) -> Result<JointState> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be positive".into()));
    }
    let state = check_state(spec, state0)?;
    let h = spec.parts();
    let mut v = state.into_amplitudes();
    advance(&h, &mut v, tau0, tau1, n_steps);
    JointState::from_raw(spec.n_max, v)
}

/// Propagates with `n_steps` and `2·n_steps`; returns the finer result when
/// the two agree to [`SELF_CONVERGENCE_TOL`] in every amplitude.
pub fn dense_propagate(
    spec: &DenseHamiltonianSpec,
    state0: &JointState,
    tau0: f64,
    tau1: f64,
    n_steps: usize,
) -> Result<JointState> {
    let coarse = dense_propagate_fixed(spec, state0, tau0, tau1, n_steps)?;
    let fine = dense_propagate_fixed(spec, state0, tau0, tau1, 2 * n_steps)?;
    let change = coarse.max_deviation(&fine);
    if change >= SELF_CONVERGENCE_TOL {
        return Err(Error::OracleNotConverged { change });
    }
    Ok(fine)
}

fn trajectory_fixed(
    spec: &DenseHamiltonianSpec,
    state: &JointState,
    tau0: f64,
    samples: &[f64],
    steps_per_unit: f64,
) -> Result<Vec<JointState>> {
    let h = spec.parts();
    let mut v = state.amplitudes().to_vec();
    let mut t = tau0;
    let mut out = Vec::with_capacity(samples.len());
    for &s in samples {
        if s < t {
            return Err(Error::InvalidParameter("samples must be ascending from tau0".into()));
        }
        if s > t {
            let steps = ((s - t) * steps_per_unit).ceil().max(1.0) as usize;
            advance(&h, &mut v, t, s, steps);
            t = s;
        }
        out.push(JointState::from_raw(spec.n_max, v.clone())?);
    }
    Ok(out)
}

/// States at ascending `samples`, using ⌈Δτ·steps_per_unit⌉ steps per
/// interval, with the same doubling check as [`dense_propagate`].
pub fn dense_trajectory(
    spec: &DenseHamiltonianSpec,
    state0: &JointState,
    tau0: f64,
    samples: &[f64],
    steps_per_unit: f64,
) -> Result<Vec<JointState>> {
    let state = check_state(spec, state0)?;
    let coarse = trajectory_fixed(spec, &state, tau0, samples, steps_per_unit)?;
    let fine = trajectory_fixed(spec, &state, tau0, samples, 2.0 * steps_per_unit)?;
    let change = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| a.max_deviation(b))
        .fold(0.0, f64::max);
    if change >= SELF_CONVERGENCE_TOL {
        return Err(Error::OracleNotConverged { change });
    }
    Ok(fine)
}

/// Like [`dense_trajectory`], but doubles the resolution (at most
/// `max_doublings` times) until the doubling check passes. Returns the
/// states and the resolution that was accepted.
pub fn dense_trajectory_refined(
    spec: &DenseHamiltonianSpec,
    state0: &JointState,
    tau0: f64,
    samples: &[f64],
    steps_per_unit: f64,
    max_doublings: usize,
) -> Result<(Vec<JointState>, f64)> {
    let state = check_state(spec, state0)?;
    let mut resolution = steps_per_unit;
    let mut coarse = trajectory_fixed(spec, &state, tau0, samples, resolution)?;
    let mut change = f64::INFINITY;
    for _ in 0..=max_doublings {
        resolution *= 2.0;
        let fine = trajectory_fixed(spec, &state, tau0, samples, resolution)?;
        change = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| a.max_deviation(b))
            .fold(0.0, f64::max);
        if change < SELF_CONVERGENCE_TOL {
            return Ok((fine, resolution));
        }
        coarse = fine;
    }
    Err(Error::OracleNotConverged { change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembled_matrices_are_hermitian() {
        for model in [Model::Rwa, Model::Full] {
            let spec = DenseHamiltonianSpec::new(model, 0.7, 6);
            for tau in [-3.0, 0.0, 2.5] {
                let m = spec.matrix(tau);
                assert_eq!(m.nrows(), 14);
                assert_eq!(m, m.adjoint());
            }
        }
    }

    #[test]
    fn rwa_matrix_is_block_diagonal_over_dressed_pairs() {
        let spec = DenseHamiltonianSpec::new(Model::Rwa, 0.3, 5);
        let m = spec.matrix(1.7);
        let stride = 6;
        // (x, n) is only connected to its dressed partner
        let partner = |i: usize| -> Option<usize> {
            let (x, n) = (i / stride, i % stride);
            match x {
                1 if n < 5 => Some(n + 1),
                0 if n > 0 => Some(stride + n - 1),
                _ => None,
            }
        };
        for i in 0..12 {
            for j in 0..12 {
                if i != j && m[(i, j)].norm() > 0.0 {
                    assert_eq!(partner(i), Some(j), "({i}, {j})");
                }
            }
        }
        // |0,g⟩ is a singlet
        assert!((0..12).filter(|&j| j != 0).all(|j| m[(0, j)].norm() == 0.0));
    }

    #[test]
    fn krylov_matches_dense_exponential() {
        let spec = DenseHamiltonianSpec::new(Model::Full, 1.3, 7);
        let tau = 0.8;
        let dt = 0.37;
        let h = spec.parts();
        let mut v: Vec<Complex64> = (0..spec.dim())
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let m = spec.matrix(tau);
        let eig = m.clone().symmetric_eigen();
        let vec = nalgebra::DVector::from_vec(v.clone());
        let phases = nalgebra::DVector::from_iterator(
            spec.dim(),
            eig.eigenvalues.iter().map(|l| Complex64::from_polar(1.0, -dt * l)),
        );
        let coeffs = eig.eigenvectors.adjoint() * vec;
        let exact = &eig.eigenvectors * coeffs.component_mul(&phases);
        krylov_exp(&h, tau, dt, &mut v);
        for i in 0..spec.dim() {
            assert!((v[i] - exact[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn vacuum_rwa_is_phase_only() {
        let spec = DenseHamiltonianSpec::new(Model::Rwa, 0.5, 3);
        let s = JointState::fock(0, Qubit::Ground, 3).unwrap();
        let out = dense_propagate(&spec, &s, -2.0, 3.0, 50).unwrap();
        let expected = Complex64::from_polar(1.0, -(9.0 - 4.0) / 2.0);
        assert!((out.get(Qubit::Ground, 0) - expected).norm() < 1e-12);
        assert!((out.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn unresolved_run_is_reported() {
        let spec = DenseHamiltonianSpec::new(Model::Full, 2.0, 20);
        let s = JointState::fock(0, Qubit::Excited, 20).unwrap();
        assert!(matches!(
            dense_propagate(&spec, &s, 1.0, 6.0, 2),
            Err(Error::OracleNotConverged { .. })
        ));
    }
}
