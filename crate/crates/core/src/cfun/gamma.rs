use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.5);
    let x = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Principal branch of log Γ(z): the analytic continuation that is real on
/// the positive real axis, with its cut along the negative real axis.
///
/// For Re z < 1/2 the argument is shifted up with log Γ(z) = log Γ(z+m) −
/// Σ log(z+k) so the branch stays continuous.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("log_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re >= 0.5 {
        return Ok(lanczos_log_gamma(z));
    }
    let shift = (0.5 - z.re).ceil() as usize;
    let mut acc = lanczos_log_gamma(z + shift as f64);
    for k in 0..shift {
        acc -= (z + k as f64).ln();
    }
    Ok(acc)
}

/// log(1/Γ(z)), or `None` where 1/Γ vanishes (the poles of Γ).
pub(crate) fn log_recip_gamma(z: Complex64) -> Result<Option<Complex64>> {
    match log_gamma(z) {
        Ok(v) => Ok(Some(-v)),
        Err(Error::Pole { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factorial_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let v = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((v.re - 24f64.ln()).abs() < 1e-13 && v.im.abs() < 1e-15);
        let v = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((v.re - 0.572_364_942_924_700_1).abs() < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(log_gamma(c(x, 0.0)), Err(Error::Pole { .. })));
        }
        assert!(log_recip_gamma(c(-3.0, 0.0)).unwrap().is_none());
        assert!(log_gamma(c(-3.0, 1e-9)).is_ok());
    }

    #[test]
    fn reflection_magnitude() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for y in [0.1, 1.0, 4.0] {
            let v = log_gamma(c(0.5, y)).unwrap();
            let expected = 0.5 * (PI / (PI * y).cosh()).ln();
            assert!((v.re - expected).abs() < 1e-13, "y = {y}");
        }
    }
}
