use rayon::prelude::*;

use qlz_core::cfun::{Hyp1F1Config, DEFAULT_ASYMPTOTIC_ORDER};
use qlz_core::lzfull::{
    integrate_full_auto, parity_expectation, population_difference_full, to_lab, uniform_grid, FullParams,
    DEFAULT_SAMPLES, TRUNCATION_WARNING,
};
use qlz_core::lzrwa::{
    basis_solutions, evolve_rwa, pe_half_crossing, pe_symmetric_asymptotic, population_difference,
    sector_excited_probability, sector_propagator, RwaEvolver, RwaParams,
};
use qlz_core::oracle::{
    dense_propagate, dense_trajectory_refined, ode_sector_matrix, DenseHamiltonianSpec, Model,
};
use qlz_core::{FockSpec, JointState, Qubit};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Stand-in for an infinite sweep time.
pub const FAR_TAU: f64 = 1e6;
/// Highest n_max reached by automatic truncation doubling.
pub const N_MAX_CAP: usize = 3200;
const FIGURE_G: f64 = 0.1;
const FIGURE_SECTORS: usize = 101;

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = match cfg.command {
        Command::SolveRwa => solve_rwa(cfg)?,
        Command::SolveFull => solve_full(cfg)?,
        Command::Asymptote => asymptote(cfg)?,
        Command::Figure => match cfg.figure {
            Some(1) => figure1(cfg)?,
            Some(2) => figure2()?,
            Some(3) => figure3(cfg)?,
            Some(4) => figure4()?,
            Some(5) => figure5(cfg)?,
            _ => unreachable!("figure number checked during config resolution"),
        },
        Command::Validate => validate()?,
    };
    stamp(&mut table, cfg);
    Ok(table)
}

/// Prepends the run-identifying metadata.
pub fn stamp(table: &mut Table, cfg: &RunConfig) {
    let mut head = vec![
        ("program".to_string(), format!("qlz {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), cfg.command.name().to_string()),
    ];
    if let Some(n) = cfg.figure {
        head.push(("figure".to_string(), n.to_string()));
    }
    head.push(("format".to_string(), cfg.format.name().to_string()));
    head.append(&mut table.metadata);
    table.metadata = head;
}

fn sigma_row(tau: f64, state: &JointState, sigma_z: f64) -> Vec<Cell> {
    vec![tau.into(), sigma_z.into(), ((1.0 + sigma_z) / 2.0).into(), state.norm().into()]
}

/// ⟨σ_z⟩ of an RWA run sampled at `grid`, one closed-form evaluation per point.
fn rwa_sigma_z(state: &JointState, g: f64, tau0: f64, grid: &[f64]) -> Result<Vec<(f64, JointState)>, CliError> {
    let evolver = RwaEvolver::new(state, g, tau0, state.n_max(), Hyp1F1Config::default())?;
    grid.par_iter()
        .map(|&tau| Ok((tau, evolver.at(tau)?)))
        .collect()
}

fn solve_rwa(cfg: &RunConfig) -> Result<Table, CliError> {
    let g = cfg.g.unwrap_or(FIGURE_G);
    let tau0 = cfg.tau0.unwrap_or(-10.0);
    let tau1 = cfg.tau1.unwrap_or(10.0);
    let spec = cfg.state.unwrap_or(FockSpec::new(1, Qubit::Ground));
    let n_max = cfg.n_max.unwrap_or(spec.photons + 1);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    RwaParams::new(g, tau0, tau1, n_max)?;
    let state = spec.to_state(n_max)?;
    let grid = uniform_grid(tau0, tau1, samples);

    let mut t = Table::new(&["tau", "sigma_z", "pe", "norm"]);
    t.meta("model", "rwa")
        .meta("g", g)
        .meta("tau0", tau0)
        .meta("tau1", tau1)
        .meta("state", spec)
        .meta("nmax", n_max)
        .meta("samples", samples)
        .meta("units", "tau = v^2 t, energies in hbar*omega0");
    for (tau, s) in rwa_sigma_z(&state, g, tau0, &grid)? {
        t.push(sigma_row(tau, &s, population_difference(&s)));
    }
    Ok(t)
}

fn full_params(g: f64, tau0: f64, tau1: f64, n_max: usize, rel_tol: f64) -> FullParams {
    FullParams {
        g,
        tau0,
        tau1,
        n_max,
        rel_tol,
        abs_tol: rel_tol / 1e3,
    }
}

fn solve_full(cfg: &RunConfig) -> Result<Table, CliError> {
    let defaults = FullParams::default();
    let spec = cfg.state.unwrap_or(FockSpec::new(0, Qubit::Excited));
    let p = full_params(
        cfg.g.unwrap_or(defaults.g),
        cfg.tau0.unwrap_or(defaults.tau0),
        cfg.tau1.unwrap_or(defaults.tau1),
        cfg.n_max.unwrap_or(defaults.n_max),
        cfg.rel_tol.unwrap_or(defaults.rel_tol),
    );
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let state = spec.to_state(p.n_max)?;
    let grid = uniform_grid(p.tau0, p.tau1, samples);
    let traj = integrate_full_auto(&state, &p, &grid, TRUNCATION_WARNING, N_MAX_CAP)?;
    let parity0 = parity_expectation(&traj.samples[0].state);
    let parity_drift = traj
        .samples
        .iter()
        .map(|s| (parity_expectation(&s.state) - parity0).abs())
        .fold(0.0, f64::max);

    let mut t = Table::new(&["tau", "sigma_z", "pe", "norm"]);
    t.meta("model", "full")
        .meta("g", p.g)
        .meta("tau0", p.tau0)
        .meta("tau1", p.tau1)
        .meta("state", spec)
        .meta("nmax_requested", p.n_max)
        .meta("nmax", traj.n_max)
        .meta("samples", samples)
        .meta("rel_tol", p.rel_tol)
        .meta("abs_tol", p.abs_tol)
        .meta("max_top_population", format!("{:e}", traj.max_top_population))
        .meta("max_norm_drift", format!("{:e}", traj.max_norm_drift))
        .meta("max_parity_drift", format!("{parity_drift:e}"))
        .meta("units", "tau = u^2 t, energies in hbar*omega");
    for s in &traj.samples {
        t.push(sigma_row(s.tau, &s.state.amps, population_difference_full(&s.state)));
    }
    Ok(t)
}

/// Excited-state probability after the sweep for a qubit prepared in
/// `start` within dressed sector `n`, beside its limiting formula.
fn asymptote_rows(
    g: f64,
    tau0: f64,
    tau1: f64,
    start: Qubit,
    sectors: usize,
    config: &Hyp1F1Config,
) -> Result<Vec<(usize, f64, f64)>, CliError> {
    (0..=sectors)
        .into_par_iter()
        .map(|n| {
            let formula = if tau0 == 0.0 {
                pe_half_crossing(g, n, start == Qubit::Excited)
            } else if start == Qubit::Ground {
                pe_symmetric_asymptotic(g, n)
            } else {
                1.0 - pe_symmetric_asymptotic(g, n)
            };
            let numeric = sector_excited_probability(g, n, tau0, tau1, start, config)?;
            Ok((n, formula, numeric))
        })
        .collect()
}

const SECTOR_NOTE: &str = "n labels the dressed pair (|n,e>, |n+1,g>); a ground start in sector n is |n+1,g>";

fn asymptote(cfg: &RunConfig) -> Result<Table, CliError> {
    let g = cfg.g.unwrap_or(FIGURE_G);
    let tau0 = cfg.tau0.unwrap_or(-FAR_TAU);
    let tau1 = cfg.tau1.unwrap_or(FAR_TAU);
    let start = cfg.state.map(|s| s.qubit).unwrap_or(Qubit::Ground);
    let sectors = cfg.n_max.unwrap_or(FIGURE_SECTORS);
    RwaParams::new(g, tau0, tau1, sectors + 1)?;
    let formula = if tau0 == 0.0 {
        "(1 +- exp(-pi g_n^2 / 2)) / 2"
    } else {
        "1 - exp(-pi g_n^2) for a ground start, exp(-pi g_n^2) for an excited start"
    };
    let mut t = Table::new(&["n", "pe_formula", "pe_numeric", "abs_diff"]);
    t.meta("model", "rwa")
        .meta("g", g)
        .meta("tau0", tau0)
        .meta("tau1", tau1)
        .meta("start", if start == Qubit::Excited { "e" } else { "g" })
        .meta("nmax", sectors)
        .meta("formula", formula)
        .meta("sectors", SECTOR_NOTE);
    for (n, f, x) in asymptote_rows(g, tau0, tau1, start, sectors, &Hyp1F1Config::default())? {
        t.push(vec![n.into(), f.into(), x.into(), (x - f).abs().into()]);
    }
    Ok(t)
}

fn figure1(cfg: &RunConfig) -> Result<Table, CliError> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let grid = uniform_grid(-10.0, 10.0, samples);
    let cells: Vec<(&str, f64, usize)> = [("a", -FAR_TAU), ("b", -10.0)]
        .iter()
        .flat_map(|&(panel, tau0)| [1, 11, 31, 101].map(|n| (panel, tau0, n)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(panel, tau0, n)| {
            let state = JointState::fock(n + 1, Qubit::Ground, n + 1)?;
            Ok((panel, tau0, n, rwa_sigma_z(&state, FIGURE_G, tau0, &grid)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&["panel", "tau0", "n", "photons", "tau", "sigma_z"]);
    t.meta("model", "rwa")
        .meta("g", FIGURE_G)
        .meta("state", "ground start in sector n")
        .meta("tau0", format!("{} (a), -10 (b)", -FAR_TAU))
        .meta("tau_window", "[-10, 10]")
        .meta("samples", samples)
        .meta("sectors", SECTOR_NOTE);
    for (panel, tau0, n, traj) in results {
        for (tau, s) in traj {
            t.push(vec![
                panel.into(),
                tau0.into(),
                n.into(),
                (n + 1).into(),
                tau.into(),
                population_difference(&s).into(),
            ]);
        }
    }
    Ok(t)
}

fn figure2() -> Result<Table, CliError> {
    let config = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    let mut t = Table::new(&["series", "tau0", "n", "pe_formula", "pe_numeric", "abs_diff"]);
    t.meta("model", "rwa")
        .meta("g", FIGURE_G)
        .meta("tau1", FAR_TAU)
        .meta("start", "g")
        .meta("asymptotic_order", DEFAULT_ASYMPTOTIC_ORDER)
        .meta("formula", "1 - exp(-pi g_n^2)")
        .meta("series", "symmetric: tau0 = -1e6; asymmetric: tau0 = -10 (finite start, not expected to match the formula)")
        .meta("sectors", SECTOR_NOTE);
    for (series, tau0) in [("symmetric", -FAR_TAU), ("asymmetric", -10.0)] {
        for (n, f, x) in asymptote_rows(FIGURE_G, tau0, FAR_TAU, Qubit::Ground, FIGURE_SECTORS, &config)? {
            t.push(vec![series.into(), tau0.into(), n.into(), f.into(), x.into(), (x - f).abs().into()]);
        }
    }
    Ok(t)
}

fn figure3(cfg: &RunConfig) -> Result<Table, CliError> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let cells: Vec<(&str, f64, usize)> = [("a", 10.0), ("b", 100.0)]
        .iter()
        .flat_map(|&(panel, tau1)| [0, 10, 30, 100].map(|n| (panel, tau1, n)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(panel, tau1, n)| {
            let state = JointState::fock(n, Qubit::Excited, n + 1)?;
            let grid = uniform_grid(0.0, tau1, samples);
            Ok((panel, n, rwa_sigma_z(&state, FIGURE_G, 0.0, &grid)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&["panel", "n", "tau", "sigma_z"]);
    t.meta("model", "rwa")
        .meta("g", FIGURE_G)
        .meta("tau0", 0.0)
        .meta("tau1", "10 (a), 100 (b)")
        .meta("state", "fock:n,e")
        .meta("samples", samples);
    for (panel, n, traj) in results {
        for (tau, s) in traj {
            t.push(vec![panel.into(), n.into(), tau.into(), population_difference(&s).into()]);
        }
    }
    Ok(t)
}

fn figure4() -> Result<Table, CliError> {
    let config = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    let mut t = Table::new(&["start", "n", "pe_formula", "pe_numeric", "abs_diff"]);
    t.meta("model", "rwa")
        .meta("g", FIGURE_G)
        .meta("tau0", 0.0)
        .meta("tau1", FAR_TAU)
        .meta("asymptotic_order", DEFAULT_ASYMPTOTIC_ORDER)
        .meta("formula", "(1 +- exp(-pi g_n^2 / 2)) / 2")
        .meta("sectors", SECTOR_NOTE);
    for (label, start) in [("e", Qubit::Excited), ("g", Qubit::Ground)] {
        for (n, f, x) in asymptote_rows(FIGURE_G, 0.0, FAR_TAU, start, FIGURE_SECTORS, &config)? {
            t.push(vec![label.into(), n.into(), f.into(), x.into(), (x - f).abs().into()]);
        }
    }
    Ok(t)
}

fn figure5(cfg: &RunConfig) -> Result<Table, CliError> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let rel_tol = cfg.rel_tol.unwrap_or(FullParams::default().rel_tol);
    let grid = uniform_grid(1.0, 11.0, samples);
    let state = JointState::fock(0, Qubit::Excited, 0)?;
    let results = [0.1, 1.0, 3.0, 10.0]
        .par_iter()
        .map(|&g| {
            let p = full_params(g, 1.0, 11.0, 100, rel_tol);
            Ok((g, integrate_full_auto(&state, &p, &grid, TRUNCATION_WARNING, N_MAX_CAP)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&["g", "nmax", "tau", "sigma_z"]);
    t.meta("model", "full")
        .meta("state", "fock:0,e")
        .meta("tau0", 1.0)
        .meta("tau1", 11.0)
        .meta("nmax_requested", 100)
        .meta("rel_tol", rel_tol)
        .meta("abs_tol", rel_tol / 1e3)
        .meta("samples", samples);
    for (g, traj) in results {
        for s in &traj.samples {
            t.push(vec![g.into(), traj.n_max.into(), s.tau.into(), population_difference_full(&s.state).into()]);
        }
    }
    Ok(t)
}

struct Check {
    name: &'static str,
    threshold: f64,
    run: fn() -> Result<f64, CliError>,
}

fn check_wronskian() -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for g_n in [0.0, 0.1, 0.5, 1.005, 1.01] {
        for tau in uniform_grid(-10.0, 10.0, 2001) {
            worst = worst.max((basis_solutions(g_n, tau)?.wronskian() - 1.0).norm());
        }
    }
    Ok(worst)
}

fn check_sector_oracle() -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for g in [0.05, 0.1, 0.2] {
        for n in [0, 1, 11, 31, 101] {
            let u = sector_propagator(g, n, -10.0, 10.0)?;
            worst = worst.max(u.max_deviation(&ode_sector_matrix(g, n, -10.0, 10.0)?));
        }
    }
    Ok(worst)
}

fn check_rwa_dense() -> Result<f64, CliError> {
    let state = JointState::fock(11, Qubit::Ground, 14)?;
    let closed = evolve_rwa(&state, &RwaParams::new(0.1, -10.0, 10.0, 14)?)?;
    let spec = DenseHamiltonianSpec::new(Model::Rwa, 0.1, 14);
    Ok(closed.max_deviation(&dense_propagate(&spec, &state, -10.0, 10.0, 4000)?))
}

fn check_full_dense() -> Result<f64, CliError> {
    let state = JointState::fock(0, Qubit::Excited, 0)?;
    let grid = uniform_grid(1.0, 11.0, 41);
    let mut worst: f64 = 0.0;
    for g in [0.1, 1.0, 3.0] {
        let p = full_params(g, 1.0, 11.0, 100, 1e-10);
        let traj = integrate_full_auto(&state, &p, &grid, 1e-8, N_MAX_CAP)?;
        let spec = DenseHamiltonianSpec::new(Model::Full, g, traj.n_max);
        let (dense, _) = dense_trajectory_refined(&spec, &state, 1.0, &grid, 20.0 * (1.0 + g), 5)?;
        for (s, d) in traj.samples.iter().zip(&dense) {
            worst = worst.max(to_lab(&s.state)?.max_deviation(d));
        }
    }
    Ok(worst)
}

fn worst_gap(rows: Vec<(usize, f64, f64)>) -> f64 {
    rows.iter().map(|(_, f, x)| (x - f).abs()).fold(0.0, f64::max)
}

fn check_symmetric() -> Result<f64, CliError> {
    let config = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    Ok(worst_gap(asymptote_rows(FIGURE_G, -FAR_TAU, FAR_TAU, Qubit::Ground, FIGURE_SECTORS, &config)?))
}

fn check_half_crossing() -> Result<f64, CliError> {
    let config = Hyp1F1Config::fixed_order(DEFAULT_ASYMPTOTIC_ORDER);
    let mut worst: f64 = 0.0;
    for start in Qubit::BOTH {
        worst = worst.max(worst_gap(asymptote_rows(FIGURE_G, 0.0, FAR_TAU, start, FIGURE_SECTORS, &config)?));
    }
    Ok(worst)
}

const CHECKS: [Check; 6] = [
    Check { name: "wronskian", threshold: 1e-8, run: check_wronskian },
    Check { name: "sector_vs_ode", threshold: 1e-6, run: check_sector_oracle },
    Check { name: "rwa_vs_dense", threshold: 1e-6, run: check_rwa_dense },
    Check { name: "full_vs_dense", threshold: 1e-4, run: check_full_dense },
    Check { name: "symmetric_asymptote", threshold: 1e-3, run: check_symmetric },
    Check { name: "half_crossing_asymptote", threshold: 1e-3, run: check_half_crossing },
];

fn validate() -> Result<Table, CliError> {
    let results: Vec<Result<f64, CliError>> = CHECKS.par_iter().map(|c| (c.run)()).collect();
    let mut t = Table::new(&["check", "max_deviation", "threshold", "status"]);
    t.meta("suite", "oracle equivalence");
    let mut failed = Vec::new();
    for (check, result) in CHECKS.iter().zip(results) {
        let deviation = result?;
        let ok = deviation < check.threshold;
        if !ok {
            failed.push(check.name);
        }
        t.push(vec![
            check.name.into(),
            deviation.into(),
            check.threshold.into(),
            if ok { "pass" } else { "fail" }.into(),
        ]);
    }
    if failed.is_empty() {
        Ok(t)
    } else {
        Err(CliError::Validation {
            report: Box::new(t),
            failed: failed.join(", "),
        })
    }
}
