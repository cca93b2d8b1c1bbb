use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lzrwa::{effective_coupling, SectorBasisSolutions};
use crate::ode::Dopri5;
use crate::state::NORMALIZATION_TOL;

pub const ORACLE_REL_TOL: f64 = 1e-12;
pub const ORACLE_ABS_TOL: f64 = 1e-14;

/// Integrates i∂c₁ = −τc₁ + g_n c₀, i∂c₀ = τc₀ + g_n c₁ from τ₀ to τ₁.
fn integrate_pair(g_n: f64, tau0: f64, tau1: f64, initial: [Complex64; 2]) -> Result<[Complex64; 2]> {
    if !(g_n.is_finite() && g_n >= 0.0 && tau0.is_finite() && tau1.is_finite()) {
        return Err(Error::InvalidParameter("oracle parameters must be finite, g ≥ 0".into()));
    }
    let solver = Dopri5::new(ORACLE_REL_TOL, ORACLE_ABS_TOL);
    let minus_i = Complex64::new(0.0, -1.0);
    let (ys, _) = solver.integrate(
        |tau, c, dc| {
            dc[0] = minus_i * (-tau * c[0] + g_n * c[1]);
            dc[1] = minus_i * (tau * c[1] + g_n * c[0]);
        },
        tau0,
        &initial,
        &[tau1],
        |tau| 0.05 / tau.abs().max(1.0),
        |_, _| {},
    )?;
    Ok([ys[0][0], ys[0][1]])
}

/// Direct high-accuracy integration of one dressed sector, components
/// ordered (|n,e⟩, |n+1,g⟩).
pub fn ode_sector_oracle(
    g: f64,
    n: usize,
    tau0: f64,
    tau1: f64,
    initial: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    let norm = (initial[0].norm_sqr() + initial[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NormDrift {
            drift: (norm - 1.0).abs(),
        });
    }
    integrate_pair(effective_coupling(g, n), tau0, tau1, initial)
}

/// Propagator of sector `n` assembled column by column from the oracle.
pub fn ode_sector_matrix(g: f64, n: usize, tau0: f64, tau1: f64) -> Result<[[Complex64; 2]; 2]> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let col0 = ode_sector_oracle(g, n, tau0, tau1, [one, zero])?;
    let col1 = ode_sector_oracle(g, n, tau0, tau1, [zero, one])?;
    Ok([[col0[0], col1[0]], [col0[1], col1[1]]])
}

/// Even/odd basis amplitudes obtained by integrating from τ = 0 with data
/// (1, 0) and (0, 1).
pub fn ode_basis_solutions(g_n: f64, tau: f64) -> Result<SectorBasisSolutions> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let [c1e, c0o] = integrate_pair(g_n, 0.0, tau, [one, zero])?;
    let [c1o, c0e] = integrate_pair(g_n, 0.0, tau, [zero, one])?;
    Ok(SectorBasisSolutions { c1e, c1o, c0e, c0o })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_phases() {
        let (t0, t1) = (-3.0_f64, 4.0_f64);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = ode_sector_oracle(0.0, 5, t0, t1, [Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        let phase = (t1 * t1 - t0 * t0) / 2.0;
        assert!((out[0] - h * Complex64::from_polar(1.0, phase)).norm() < 1e-9);
        assert!((out[1] - Complex64::new(0.0, h) * Complex64::from_polar(1.0, -phase)).norm() < 1e-9);
    }

    #[test]
    fn preserves_norm() {
        let out = ode_sector_oracle(0.2, 3, -10.0, 10.0, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let norm = (out[0].norm_sqr() + out[1].norm_sqr()).sqrt();
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }

    #[test]
    fn rejects_unnormalized_input() {
        let r = ode_sector_oracle(0.1, 0, 0.0, 1.0, [Complex64::new(1.0, 0.0); 2]);
        assert!(matches!(r, Err(Error::NormDrift { .. })));
    }
}
