//! Kummer's confluent hypergeometric function 1F1(a; b; z) for complex
//! parameters, tuned for the nearly imaginary arguments z = ±iτ².

use std::f64::consts::PI;

use num_complex::Complex64;

use super::dd::CDd;
use super::gamma::{log_gamma, log_recip_gamma};
use crate::error::{Error, Result};
use crate::ode::Dopri5;

/// |z| at which [`hyp1f1`] hands over from the series to the asymptotic expansion.
pub const SERIES_SWITCH_RADIUS: f64 = 30.0;
/// Smallest |z| accepted by the asymptotic expansion.
pub const ASYMPTOTIC_MIN_RADIUS: f64 = 20.0;
/// Hard cap on Maclaurin terms; hitting it is reported as non-convergence.
pub const SERIES_TERM_CAP: usize = 10_000;
pub const DEFAULT_SERIES_TOL: f64 = 1e-17;
/// Order of the fixed-order expansion used for the ±10⁶ asymptotic figures.
pub const DEFAULT_ASYMPTOTIC_ORDER: usize = 3;
/// Relative truncation estimate above which the optimal expansion is not
/// trusted.
pub const ASYMPTOTIC_ACCEPT: f64 = 1e-13;
/// Relative accuracy the series must reach before it is used as is.
pub const TARGET_ACCURACY: f64 = 1e-12;
const KUMMER_REL_TOL: f64 = 1e-13;
const KUMMER_STEP_CEILING: f64 = 0.25;
const KUMMER_MIN_START: f64 = 1e-3;
/// Absolute error of the double-double series per unit of its largest term.
const SERIES_ROUNDING: f64 = 1e-29;

const OPTIMAL_TERM_CAP: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyp1F1Params {
    pub a: Complex64,
    pub b: Complex64,
    pub z: Complex64,
}

impl Hyp1F1Params {
    pub fn new(a: Complex64, b: Complex64, z: Complex64) -> Self {
        Self { a, b, z }
    }
}

/// How the two large-|z| sums are cut off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticTruncation {
    /// Keep exactly this many terms (k = 0..order) in each sector.
    Order(usize),
    /// Stop at the smallest term or once terms drop below double precision.
    Optimal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyp1F1Config {
    pub switch_radius: f64,
    pub series_tol: f64,
    pub truncation: AsymptoticTruncation,
}

impl Default for Hyp1F1Config {
    fn default() -> Self {
        Self {
            switch_radius: SERIES_SWITCH_RADIUS,
            series_tol: DEFAULT_SERIES_TOL,
            truncation: AsymptoticTruncation::Optimal,
        }
    }
}

impl Hyp1F1Config {
    /// Same dispatch, but with the third-order expansion beyond the switch.
    pub fn fixed_order(order: usize) -> Self {
        Self {
            truncation: AsymptoticTruncation::Order(order),
            ..Self::default()
        }
    }
}

fn validate(p: &Hyp1F1Params) -> Result<()> {
    let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
    if !(finite(p.a) && finite(p.b) && finite(p.z)) {
        return Err(Error::InvalidParameter(format!(
            "non-finite 1F1 argument ({}, {}, {})",
            p.a, p.b, p.z
        )));
    }
    if p.b.im == 0.0 && p.b.re <= 0.0 && p.b.re.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "1F1 lower parameter b = {} is zero or a negative integer",
            p.b.re
        )));
    }
    Ok(())
}

/// Maclaurin series Σ (a)_k z^k / ((b)_k k!), summed in double-double.
///
/// Stops once the remaining tail, bounded geometrically from the current
/// term ratio, falls below `tol` relative to the partial sum.
pub fn hyp1f1_series(p: Hyp1F1Params, tol: f64) -> Result<Complex64> {
    validate(&p)?;
    series(p, tol).map(|(v, _)| v)
}

/// Series value together with the largest term magnitude seen.
fn series(p: Hyp1F1Params, tol: f64) -> Result<(Complex64, f64)> {
    if p.z == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(1.0, 0.0), 1.0));
    }
    let (a, b, z) = (CDd::from_c64(p.a), CDd::from_c64(p.b), CDd::from_c64(p.z));
    let zmod = p.z.norm();
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut peak: f64 = 1.0;
    for k in 0..SERIES_TERM_CAP {
        let kf = k as f64;
        let num = a.add_real(kf) * z;
        let den = b.add_real(kf) * CDd::from_c64(Complex64::new(kf + 1.0, 0.0));
        term = (term * num).div(den);
        sum = sum + term;
        peak = peak.max(term.abs());
        if term.is_zero() {
            return Ok((sum.to_c64(), peak));
        }
        let ratio = (p.a + kf + 1.0).norm() * zmod / ((p.b + kf + 1.0).norm() * (kf + 2.0));
        if ratio < 0.5 && term.abs() * ratio / (1.0 - ratio) <= tol * sum.abs() {
            return Ok((sum.to_c64(), peak));
        }
    }
    Err(Error::NonConvergence {
        terms: SERIES_TERM_CAP,
    })
}

/// Σ_k (p)_k (q)_k / (k! w^k), truncated per `trunc`, with the magnitude
/// of the first omitted term.
fn asymptotic_sum(p: Complex64, q: Complex64, w: Complex64, trunc: AsymptoticTruncation) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let cap = match trunc {
        AsymptoticTruncation::Order(order) => order,
        AsymptoticTruncation::Optimal => OPTIMAL_TERM_CAP,
    };
    for k in 1..cap {
        let kf = (k - 1) as f64;
        let next = term * (p + kf) * (q + kf) / (w * k as f64);
        if trunc == AsymptoticTruncation::Optimal {
            if next.norm() >= term.norm() {
                return (sum, next.norm());
            }
            if next.norm() <= f64::EPSILON * 1e-2 * sum.norm() {
                return (sum + next, 0.0);
            }
        }
        term = next;
        sum += term;
        if term == Complex64::new(0.0, 0.0) {
            return (sum, 0.0);
        }
    }
    let kf = (cap - 1) as f64;
    (sum, (term * (p + kf) * (q + kf) / (w * cap as f64)).norm())
}

/// Asymptotic value and an absolute estimate of its truncation error.
fn asymptotic(p: Hyp1F1Params, trunc: AsymptoticTruncation) -> Result<(Complex64, f64)> {
    validate(&p)?;
    if trunc == AsymptoticTruncation::Order(0) {
        return Err(Error::InvalidParameter("asymptotic order must be at least 1".into()));
    }
    let modulus = p.z.norm();
    if modulus < ASYMPTOTIC_MIN_RADIUS {
        return Err(Error::AsymptoticDomain {
            modulus,
            min_radius: ASYMPTOTIC_MIN_RADIUS,
        });
    }
    let i = Complex64::new(0.0, 1.0);
    let log_z = p.z.ln();
    let log_gamma_b = log_gamma(p.b)?;
    // upper half-plane takes e^{+iπa}
    let sign = if p.z.im >= 0.0 { 1.0 } else { -1.0 };
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;

    if let Some(lr) = log_recip_gamma(p.b - p.a)? {
        let prefactor = (log_gamma_b + lr + i * PI * p.a * sign - p.a * log_z).exp();
        let (sum, tail) = asymptotic_sum(p.a, p.a - p.b + 1.0, -p.z, trunc);
        total += prefactor * sum;
        error += prefactor.norm() * tail;
    }
    if let Some(lr) = log_recip_gamma(p.a)? {
        // e^{i Im z} is formed on its own so a huge phase is not rounded
        // together with the O(1) log terms.
        let prefactor = (log_gamma_b + lr + p.z.re + (p.a - p.b) * log_z).exp()
            * Complex64::from_polar(1.0, p.z.im);
        let (sum, tail) = asymptotic_sum(p.b - p.a, 1.0 - p.a, p.z, trunc);
        total += prefactor * sum;
        error += prefactor.norm() * tail;
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "asymptotic 1F1 overflowed at z = {}",
            p.z
        )));
    }
    Ok((total, error))
}

/// Two-sector large-|z| expansion keeping `order` terms per sector.
pub fn hyp1f1_asymptotic(p: Hyp1F1Params, order: usize) -> Result<Complex64> {
    asymptotic(p, AsymptoticTruncation::Order(order)).map(|(v, _)| v)
}

/// Two-sector large-|z| expansion truncated at its smallest term.
pub fn hyp1f1_asymptotic_optimal(p: Hyp1F1Params) -> Result<Complex64> {
    asymptotic(p, AsymptoticTruncation::Optimal).map(|(v, _)| v)
}

/// 1F1 with the default regime dispatch.
pub fn hyp1f1(p: Hyp1F1Params) -> Result<Complex64> {
    hyp1f1_with(p, &Hyp1F1Config::default())
}

/// Default dispatch: the series inside `switch_radius`, the optimally
/// truncated expansion outside it, and Kummer's equation integrated along the
/// ray through z when neither reaches [`TARGET_ACCURACY`] (parameters large
/// compared with |z|). A fixed-order truncation disables the fallbacks.
pub fn hyp1f1_with(p: Hyp1F1Params, config: &Hyp1F1Config) -> Result<Complex64> {
    validate(&p)?;
    let inside = p.z.norm() <= config.switch_radius;
    if let AsymptoticTruncation::Order(_) = config.truncation {
        return if inside {
            series(p, config.series_tol).map(|(v, _)| v)
        } else {
            asymptotic(p, config.truncation).map(|(v, _)| v)
        };
    }
    if !inside {
        let (value, error) = asymptotic(p, config.truncation)?;
        if error <= ASYMPTOTIC_ACCEPT * value.norm() {
            return Ok(value);
        }
    }
    if let Ok((value, peak)) = series(p, config.series_tol) {
        if series_is_clean(value, peak) {
            return Ok(value);
        }
    }
    kummer_ode(p, config)
}

fn series_is_clean(value: Complex64, peak: f64) -> bool {
    peak * SERIES_ROUNDING <= TARGET_ACCURACY * value.norm().max(1e-3)
}

/// Integrates z w'' + (b − z) w' − a w = 0 along the ray through z, starting
/// from series values at the largest radius (halving from the switch radius)
/// where the series is still clean.
fn kummer_ode(p: Hyp1F1Params, config: &Hyp1F1Config) -> Result<Complex64> {
    let radius = p.z.norm();
    let dir = p.z / radius;
    let mut r0 = radius.min(config.switch_radius);
    let start = loop {
        let z0 = dir * r0;
        let (w, peak) = series(Hyp1F1Params::new(p.a, p.b, z0), config.series_tol)?;
        let (w1, peak1) = series(Hyp1F1Params::new(p.a + 1.0, p.b + 1.0, z0), config.series_tol)?;
        if series_is_clean(w, peak) && series_is_clean(w1, peak1) {
            break [w, p.a / p.b * w1];
        }
        r0 /= 2.0;
        if r0 < KUMMER_MIN_START {
            return Err(Error::NonConvergence { terms: SERIES_TERM_CAP });
        }
    };
    if r0 == radius {
        return Ok(start[0]);
    }
    let scale = start[0].norm().max(start[1].norm()).max(1.0);
    let solver = Dopri5::new(KUMMER_REL_TOL, KUMMER_REL_TOL * 1e-2 * scale);
    let (a, b) = (p.a, p.b);
    let (ys, _) = solver.integrate(
        |t, w, dw| {
            let z = dir * t;
            dw[0] = dir * w[1];
            dw[1] = dir * ((z - b) * w[1] + a * w[0]) / z;
        },
        r0,
        &start,
        &[radius],
        |_| KUMMER_STEP_CEILING,
        |_, _| {},
    )?;
    Ok(ys[0][0])
}
