use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on Σ|amplitude|² when a state is built from caller data.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Qubit level. Ground is x = 0 (σ_z = −1), excited is x = 1 (σ_z = +1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    /// σ_z eigenvalue.
    pub fn sigma_z(self) -> f64 {
        match self {
            Qubit::Ground => -1.0,
            Qubit::Excited => 1.0,
        }
    }

    pub fn flip(self) -> Qubit {
        match self {
            Qubit::Ground => Qubit::Excited,
            Qubit::Excited => Qubit::Ground,
        }
    }

    pub const BOTH: [Qubit; 2] = [Qubit::Ground, Qubit::Excited];
}

/// Dense amplitude table over (qubit level, photon number 0..=n_max).
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n_max: usize,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            amps: vec![Complex64::new(0.0, 0.0); 2 * (n_max + 1)],
        }
    }

    /// |n⟩_field ⊗ |qubit⟩.
    pub fn fock(photons: usize, qubit: Qubit, n_max: usize) -> Result<Self> {
        if photons > n_max {
            return Err(Error::TruncationOverflow { n_max });
        }
        let mut s = Self::zeros(n_max);
        s.set(qubit, photons, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds a state from amplitudes laid out as [ground n=0..=n_max, excited n=0..=n_max];
    /// the table must be normalized.
    pub fn from_amplitudes(n_max: usize, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_raw(n_max, amps)?;
        let drift = (s.norm() - 1.0).abs();
        if drift > NORMALIZATION_TOL {
            return Err(Error::NormDrift { drift });
        }
        Ok(s)
    }

    /// Like [`JointState::from_amplitudes`] without the normalization check.
    pub fn from_raw(n_max: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 2 * (n_max + 1) {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes for n_max = {n_max}, got {}",
                2 * (n_max + 1),
                amps.len()
            )));
        }
        Ok(Self { n_max, amps })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn index(&self, qubit: Qubit, n: usize) -> usize {
        qubit.index() * (self.n_max + 1) + n
    }

    pub fn get(&self, qubit: Qubit, n: usize) -> Complex64 {
        self.amps[self.index(qubit, n)]
    }

    pub fn set(&mut self, qubit: Qubit, n: usize, value: Complex64) {
        let i = self.index(qubit, n);
        self.amps[i] = value;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn population(&self, qubit: Qubit, n: usize) -> f64 {
        self.get(qubit, n).norm_sqr()
    }

    /// Total probability of the given qubit level.
    pub fn level_population(&self, qubit: Qubit) -> f64 {
        (0..=self.n_max).map(|n| self.population(qubit, n)).sum()
    }

    /// Σ_x |amp(x, n_max)|², the weight sitting at the truncation edge.
    pub fn top_sector_population(&self) -> f64 {
        Qubit::BOTH.iter().map(|&q| self.population(q, self.n_max)).sum()
    }

    /// Highest photon number with a nonzero amplitude on either level.
    pub fn highest_occupied(&self) -> Option<usize> {
        (0..=self.n_max)
            .rev()
            .find(|&n| Qubit::BOTH.iter().any(|&q| self.get(q, n) != Complex64::new(0.0, 0.0)))
    }

    /// Copy into a larger (or equal) truncation.
    pub fn resized(&self, n_max: usize) -> Result<Self> {
        if let Some(top) = self.highest_occupied() {
            if top > n_max {
                return Err(Error::TruncationOverflow { n_max });
            }
        }
        let mut out = Self::zeros(n_max);
        for q in Qubit::BOTH {
            for n in 0..=self.n_max.min(n_max) {
                out.set(q, n, self.get(q, n));
            }
        }
        Ok(out)
    }

    /// max_i |a_i − b_i| over a common truncation.
    pub fn max_deviation(&self, other: &JointState) -> f64 {
        let n_max = self.n_max.max(other.n_max);
        let mut worst: f64 = 0.0;
        for q in Qubit::BOTH {
            for n in 0..=n_max {
                let a = if n <= self.n_max { self.get(q, n) } else { Complex64::new(0.0, 0.0) };
                let b = if n <= other.n_max { other.get(q, n) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }
}

/// Initial-state grammar `fock:<n>,<g|e>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpec {
    pub photons: usize,
    pub qubit: Qubit,
}

impl FockSpec {
    pub fn new(photons: usize, qubit: Qubit) -> Self {
        Self { photons, qubit }
    }

    pub fn to_state(self, n_max: usize) -> Result<JointState> {
        JointState::fock(self.photons, self.qubit, n_max)
    }
}

impl FromStr for FockSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("state `{s}` does not match fock:<n>,<g|e>"));
        let body = s.trim().strip_prefix("fock:").ok_or_else(bad)?;
        let (n, q) = body.split_once(',').ok_or_else(bad)?;
        let photons = n.trim().parse::<usize>().map_err(|_| bad())?;
        let qubit = match q.trim() {
            "g" => Qubit::Ground,
            "e" => Qubit::Excited,
            _ => return Err(bad()),
        };
        Ok(Self { photons, qubit })
    }
}

impl fmt::Display for FockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.qubit {
            Qubit::Ground => 'g',
            Qubit::Excited => 'e',
        };
        write!(f, "fock:{},{}", self.photons, q)
    }
}
