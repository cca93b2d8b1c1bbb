//! Acceptance checks, one line each. Exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qlz_core::cfun::{
    hyp1f1, hyp1f1_asymptotic_optimal, hyp1f1_series, Hyp1F1Config, Hyp1F1Params, DEFAULT_ASYMPTOTIC_ORDER,
    DEFAULT_SERIES_TOL,
};
use qlz_core::lzfull::{
    integrate_full, integrate_full_auto, parity_expectation, population_difference_full, to_lab, uniform_grid,
    FullParams, FullTrajectory,
};
use qlz_core::lzrwa::{
    basis_solutions, pe_half_crossing, pe_symmetric_asymptotic, population_difference, rwa_trajectory,
    sector_excited_probability, sector_propagator, RwaParams,
};
use qlz_core::oracle::{dense_trajectory_refined, ode_sector_matrix, DenseHamiltonianSpec, Model};
use qlz_core::{JointState, Qubit, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(measured: f64, limit: f64, what: &str) -> Self {
        Self {
            passed: measured < limit,
            detail: format!("{what} = {measured:.3e} (limit {limit:.0e})"),
        }
    }

    fn all(parts: Vec<Outcome>) -> Self {
        Self {
            passed: parts.iter().all(|p| p.passed),
            detail: parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join("; "),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn wronskian_on_grid() -> Result<Outcome> {
    let grid = uniform_grid(-10.0, 10.0, 2001);
    let mut worst: f64 = 0.0;
    for g_n in [0.0, 0.1, 0.5, 1.005, 1.01] {
        for &tau in &grid {
            worst = worst.max((basis_solutions(g_n, tau)?.wronskian() - 1.0).norm());
        }
    }
    Ok(Outcome::check(worst, 1e-8, "max |W - 1|"))
}

fn closed_form_vs_ode(unitarity: &mut Vec<f64>) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in [0, 1, 11, 31, 101] {
        let u = sector_propagator(0.1, n, -10.0, 10.0)?;
        unitarity.push(u.unitarity_defect());
        worst = worst.max(u.max_deviation(&ode_sector_matrix(0.1, n, -10.0, 10.0)?));
    }
    Ok(Outcome::check(worst, 1e-6, "max entry deviation"))
}

fn symmetric_asymptote() -> Result<Outcome> {
    let cfg = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    let mut worst: f64 = 0.0;
    for n in 0..=101 {
        let numeric = sector_excited_probability(0.1, n, -1e6, 1e6, Qubit::Ground, &cfg)?;
        worst = worst.max((numeric - pe_symmetric_asymptotic(0.1, n)).abs());
    }
    Ok(Outcome::check(worst, 1e-3, "max |Pe - formula|"))
}

fn half_crossing_asymptote() -> Result<Outcome> {
    let cfg = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    let mut worst: f64 = 0.0;
    for n in 0..=101 {
        for start in Qubit::BOTH {
            let numeric = sector_excited_probability(0.1, n, 0.0, 1e6, start, &cfg)?;
            let formula = pe_half_crossing(0.1, n, start == Qubit::Excited);
            worst = worst.max((numeric - formula).abs());
        }
    }
    Ok(Outcome::check(worst, 1e-3, "max |Pe - formula|"))
}

fn full_params(g: f64) -> FullParams {
    FullParams {
        g,
        tau0: 1.0,
        tau1: 11.0,
        n_max: 100,
        rel_tol: 1e-10,
        abs_tol: 1e-13,
    }
}

fn full_vs_dense(trajectories: &mut Vec<(f64, FullTrajectory)>) -> Result<Outcome> {
    let state0 = JointState::fock(0, Qubit::Excited, 0)?;
    let grid = uniform_grid(1.0, 11.0, 41);
    let mut parts = Vec::new();
    for g in [0.1, 1.0, 3.0, 10.0] {
        let traj = integrate_full_auto(&state0, &full_params(g), &grid, 1e-8, 1600)?;
        let spec = DenseHamiltonianSpec::new(Model::Full, g, traj.n_max);
        let (dense, _) = dense_trajectory_refined(&spec, &state0, 1.0, &grid, 20.0 * (1.0 + g), 5)?;
        let mut worst: f64 = 0.0;
        for (s, d) in traj.samples.iter().zip(&dense) {
            worst = worst.max(to_lab(&s.state)?.max_deviation(d));
        }
        parts.push(Outcome::check(worst, 1e-4, &format!("g={g} n_max={} dev", traj.n_max)));
        trajectories.push((g, traj));
    }
    Ok(Outcome::all(parts))
}

fn rwa_full_consistency() -> Result<Outcome> {
    let state0 = JointState::fock(0, Qubit::Excited, 0)?;
    let elapsed = uniform_grid(0.0, 10.0, 401);
    let full_grid: Vec<f64> = elapsed.iter().map(|t| t + 1.0).collect();
    let p = FullParams {
        tau1: 11.0,
        n_max: 30,
        ..full_params(0.1)
    };
    let full = integrate_full(&state0, &p, &full_grid)?;
    let rwa = rwa_trajectory(&state0, &RwaParams::new(0.1, 0.0, 10.0, 30)?, &elapsed)?;
    let worst = full
        .samples
        .iter()
        .zip(&rwa)
        .map(|(f, (_, r))| (population_difference_full(&f.state) - population_difference(r)).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::check(worst, 0.05, "max |sz_full - sz_rwa|"))
}

fn parity_conservation(trajectories: &[(f64, FullTrajectory)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, traj) in trajectories {
        let start = parity_expectation(&traj.samples[0].state);
        for s in &traj.samples {
            worst = worst.max((parity_expectation(&s.state) - start).abs());
        }
    }
    Outcome::check(worst, 1e-6, "max parity drift")
}

fn unitarity_and_norm(unitarity: &mut Vec<f64>, trajectories: &[(f64, FullTrajectory)]) -> Result<Outcome> {
    for g in [0.0, 0.1, 1.0] {
        for n in [0, 5, 101] {
            for (t0, t1) in [(-10.0, 10.0), (0.0, 100.0), (-1e6, 1e6), (0.0, 1e6)] {
                unitarity.push(sector_propagator(g, n, t0, t1)?.unitarity_defect());
            }
        }
    }
    let mut drift: f64 = trajectories.iter().map(|(_, t)| t.max_norm_drift).fold(0.0, f64::max);
    for n in [0, 10, 30, 100] {
        let state0 = JointState::fock(n, Qubit::Excited, n + 1)?;
        let traj = rwa_trajectory(&state0, &RwaParams::new(0.1, 0.0, 100.0, n + 1)?, &uniform_grid(0.0, 100.0, 201))?;
        for (_, s) in traj {
            drift = drift.max((s.norm() - 1.0).abs());
        }
    }
    let worst = unitarity.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::all(vec![
        Outcome::check(worst, 1e-8, &format!("max |u'u - I| over {} propagators", unitarity.len())),
        Outcome::check(drift, 1e-6, "max trajectory norm drift"),
    ]))
}

fn special_functions() -> Result<Outcome> {
    let mut identity: f64 = 0.0;
    let mut overlap: f64 = 0.0;
    for g_n in [0.0, 0.1, 0.5, 1.005, 1.01, 0.1 * 102f64.sqrt()] {
        let y = g_n * g_n / 4.0;
        let families = [
            (c(0.5, y), c(0.5, 0.0)),
            (c(1.0, y), c(1.5, 0.0)),
            (c(0.0, y), c(0.5, 0.0)),
            (c(0.5, y), c(1.5, 0.0)),
        ];
        for (a, b) in families {
            identity = identity.max((hyp1f1(Hyp1F1Params::new(a, b, c(0.0, 0.0)))? - 1.0).norm());
            for s in [0.5, 3.0, 12.0, 29.0, 45.0, 400.0] {
                for z in [c(0.0, s), c(0.0, -s)] {
                    let lhs = hyp1f1(Hyp1F1Params::new(a, b, z))?;
                    let rhs = z.exp() * hyp1f1(Hyp1F1Params::new(b - a, b, -z))?;
                    identity = identity.max((lhs - rhs).norm() / lhs.norm());
                    let f = hyp1f1(Hyp1F1Params::new(c(0.0, 0.0), b, z))?;
                    identity = identity.max((f - 1.0).norm());
                    let e = hyp1f1(Hyp1F1Params::new(b, b, z))?;
                    identity = identity.max((e - z.exp()).norm() / z.exp().norm());
                }
            }
            for s in [24.0, 27.0, 30.0, 33.0, 36.0] {
                for z in [c(0.0, s), c(0.0, -s)] {
                    let p = Hyp1F1Params::new(a, b, z);
                    let series = hyp1f1_series(p, DEFAULT_SERIES_TOL)?;
                    let asym = hyp1f1_asymptotic_optimal(p)?;
                    overlap = overlap.max((series - asym).norm() / series.norm());
                }
            }
        }
    }
    Ok(Outcome::all(vec![
        Outcome::check(identity, 1e-8, "identity defect"),
        Outcome::check(overlap, 1e-6, "overlap rel. deviation"),
    ]))
}

fn trivial_physics() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let state0 = JointState::fock(3, Qubit::Excited, 8)?;
    let grid = uniform_grid(-5.0, 5.0, 51);
    for (_, s) in rwa_trajectory(&state0, &RwaParams::new(0.0, -5.0, 5.0, 8)?, &grid)? {
        worst = worst.max((population_difference(&s) - 1.0).abs());
    }
    let p = FullParams {
        g: 0.0,
        tau0: 1.0,
        tau1: 6.0,
        n_max: 8,
        ..FullParams::default()
    };
    for s in integrate_full(&state0, &p, &uniform_grid(1.0, 6.0, 51))?.samples {
        worst = worst.max((population_difference_full(&s.state) - 1.0).abs());
    }
    let vacuum = JointState::fock(0, Qubit::Ground, 4)?;
    for (tau, s) in rwa_trajectory(&vacuum, &RwaParams::new(0.5, -5.0, 5.0, 4)?, &grid)? {
        let phase = Complex64::from_polar(1.0, -(tau * tau - 25.0) / 2.0);
        worst = worst.max((s.get(Qubit::Ground, 0) - phase).norm());
        worst = worst.max((s.population(Qubit::Ground, 0) - 1.0).abs());
    }
    Ok(Outcome::check(worst, 1e-10, "max population/phase change"))
}

fn run(label: &str, budget: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = budget {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; over time budget {limit:?}"));
        }
    }
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("[{verdict}] {label}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    passed
}

fn main() -> ExitCode {
    let mut unitarity = Vec::new();
    let mut trajectories = Vec::new();
    let results = [
        run("1 wronskian on [-10,10]", Some(Duration::from_secs(5)), wronskian_on_grid),
        run("2 closed form vs ODE oracle", Some(Duration::from_secs(10)), || {
            closed_form_vs_ode(&mut unitarity)
        }),
        run("3 symmetric sweep asymptote", Some(Duration::from_secs(5)), symmetric_asymptote),
        run("4 half-crossing asymptote", Some(Duration::from_secs(5)), half_crossing_asymptote),
        run("5 full model vs dense oracle", Some(Duration::from_secs(120)), || {
            full_vs_dense(&mut trajectories)
        }),
        run("6 RWA vs full model at g=0.1", None, rwa_full_consistency),
        run("7 parity conservation", None, || Ok(parity_conservation(&trajectories))),
        run("8 unitarity and norm", None, || unitarity_and_norm(&mut unitarity, &trajectories)),
        run("9 special functions", None, special_functions),
        run("10 trivial physics", None, trivial_physics),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
