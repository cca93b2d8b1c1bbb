use num_complex::Complex64;
use proptest::prelude::*;
use qlz_core::lzfull::{
    integrate_full, parity_transform, population_difference_full, rhs, to_lab, to_rotating, uniform_grid, FullParams,
    TransformedState,
};
use qlz_core::lzrwa::{
    apply_t, apply_t_dagger, basis_solutions, evolve_rwa, population_difference, rwa_trajectory, sector_propagator,
    RwaParams,
};
use qlz_core::oracle::{
    dense_propagate, dense_trajectory, ode_basis_solutions, ode_sector_matrix, DenseHamiltonianSpec, Model,
};
use qlz_core::{JointState, Qubit};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(n_max: usize, seed: &[f64]) -> JointState {
    let mut amps: Vec<Complex64> = (0..2 * (n_max + 1))
        .map(|i| c(seed[i % seed.len()] + 0.1 * i as f64, (1.3 * i as f64 + seed[0]).sin()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    JointState::from_amplitudes(n_max, amps).unwrap()
}

#[test]
fn basis_solutions_match_direct_integration() {
    let g_n = 0.1 * 2f64.sqrt();
    let closed = basis_solutions(g_n, 5.0).unwrap();
    let ode = ode_basis_solutions(g_n, 5.0).unwrap();
    for (a, b) in [
        (closed.c1e, ode.c1e),
        (closed.c1o, ode.c1o),
        (closed.c0e, ode.c0e),
        (closed.c0o, ode.c0o),
    ] {
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn sector_propagators_match_direct_integration() {
    for g in [0.05, 0.1, 0.2] {
        for n in [0, 1, 11, 31, 101] {
            for (t0, t1) in [(-10.0, 10.0), (-4.0, 7.5), (0.0, 10.0), (3.0, -2.0 + 9.0)] {
                let u = sector_propagator(g, n, t0, t1).unwrap();
                let dev = u.max_deviation(&ode_sector_matrix(g, n, t0, t1).unwrap());
                assert!(dev < 1e-6, "g={g} n={n} ({t0},{t1}) dev={dev:e}");
            }
        }
    }
}

#[test]
fn strong_sector_couplings_match_direct_integration() {
    for (g, n) in [(1.0, 30), (2.0, 20), (5.0, 0), (0.5, 400)] {
        for (t0, t1) in [(-10.0, 10.0), (0.0, 10.0), (-7.0, -3.0)] {
            let u = sector_propagator(g, n, t0, t1).unwrap();
            let dev = u.max_deviation(&ode_sector_matrix(g, n, t0, t1).unwrap());
            assert!(dev < 1e-6, "g={g} n={n} ({t0},{t1}) dev={dev:e}");
            assert!(u.unitarity_defect() < 1e-8);
        }
    }
}

#[test]
fn rwa_matches_dense_oracle() {
    let g = 0.1;
    let n_max = 14;
    let state0 = JointState::fock(11, Qubit::Ground, n_max).unwrap();
    let closed = evolve_rwa(&state0, &RwaParams::new(g, -10.0, 10.0, n_max).unwrap()).unwrap();
    let spec = DenseHamiltonianSpec::new(Model::Rwa, g, n_max);
    let dense = dense_propagate(&spec, &state0, -10.0, 10.0, 4000).unwrap();
    let dev = closed.max_deviation(&dense);
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn one_photon_ground_state_oscillates_from_the_start() {
    let state0 = JointState::fock(1, Qubit::Ground, 3).unwrap();
    let p = RwaParams::new(0.1, -10.0, 10.0, 3).unwrap();
    let traj = rwa_trajectory(&state0, &p, &uniform_grid(-10.0, 10.0, 401)).unwrap();
    let sz: Vec<f64> = traj.iter().map(|(_, s)| population_difference(s)).collect();
    // oscillation is visible within the first unit of time
    let early = sz[..21].iter().cloned().fold(f64::MIN, f64::max);
    assert!(early > -1.0 + 1e-5);
    // partial transfer: far from both -1 and +1 at the end
    let end = *sz.last().unwrap();
    assert!(end > -1.0 + 0.02 && end < 0.0, "{end}");
}

#[test]
fn full_model_matches_dense_oracle_sigma_z() {
    let state0 = JointState::fock(0, Qubit::Excited, 0).unwrap();
    for (g, tau1) in [(0.1, 5.0), (1.0, 11.0)] {
        let p = FullParams {
            g,
            tau0: 1.0,
            tau1,
            n_max: 40,
            ..FullParams::default()
        };
        let grid = uniform_grid(1.0, tau1, 21);
        let traj = integrate_full(&state0, &p, &grid).unwrap();
        let spec = DenseHamiltonianSpec::new(Model::Full, g, 40);
        let dense = dense_trajectory(&spec, &state0, 1.0, &grid, 100.0).unwrap();
        for (s, d) in traj.samples.iter().zip(&dense) {
            let lab_sz = population_difference(d);
            assert!((population_difference_full(&s.state) - lab_sz).abs() < 1e-4);
            assert!((population_difference(&to_lab(&s.state).unwrap()) - lab_sz).abs() < 1e-4);
        }
    }
}

#[test]
fn chain_equations_match_dense_finite_difference() {
    let g = 0.1;
    let n_max = 12;
    let spec = DenseHamiltonianSpec::new(Model::Full, g, n_max);
    let state0 = JointState::fock(0, Qubit::Excited, n_max).unwrap();
    let h = 1e-3;
    let grid = [1.0, 1.0 + h, 1.0 + 2.0 * h];
    let dense = dense_trajectory(&spec, &state0, 1.0, &grid, 4000.0).unwrap();
    let rotating: Vec<Vec<Complex64>> = dense
        .iter()
        .zip(grid)
        .map(|(s, tau)| {
            let parity = parity_transform(&TransformedState::lab(s.clone()), false).unwrap();
            to_rotating(&parity, tau).unwrap().amps.into_amplitudes()
        })
        .collect();
    let parity0 = parity_transform(&TransformedState::lab(state0), false).unwrap();
    let derivative = rhs(1.0, &to_rotating(&parity0, 1.0).unwrap(), g).unwrap();
    for i in 0..derivative.len() {
        let fd = (-3.0 * rotating[0][i] + 4.0 * rotating[1][i] - rotating[2][i]) / (2.0 * h);
        assert!((fd - derivative[i]).norm() < 1e-5, "{i}: {fd} vs {}", derivative[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_compose(
        g in 0.0f64..0.5,
        n in 0usize..120,
        t0 in -10.0f64..10.0,
        t1 in -10.0f64..10.0,
        t2 in -10.0f64..10.0,
    ) {
        let a = sector_propagator(g, n, t0, t1).unwrap();
        let b = sector_propagator(g, n, t1, t2).unwrap();
        let direct = sector_propagator(g, n, t0, t2).unwrap();
        prop_assert!(direct.max_deviation(&b.after(&a).u) < 1e-7);
        prop_assert!(direct.unitarity_defect() < 1e-8);
    }

    #[test]
    fn t_is_right_unitary(seed in proptest::collection::vec(-1.0f64..1.0, 1..8), n_max in 1usize..10) {
        let mut s = random_state(n_max, &seed);
        // T† needs room on the ground branch
        s.set(Qubit::Ground, n_max, c(0.0, 0.0));
        let back = apply_t(&apply_t_dagger(&s).unwrap());
        prop_assert!(back.max_deviation(&s) < 1e-15);
        let mut without_vacuum = s.clone();
        without_vacuum.set(Qubit::Ground, 0, c(0.0, 0.0));
        let round = apply_t_dagger(&apply_t(&without_vacuum)).unwrap();
        prop_assert!(round.max_deviation(&without_vacuum) < 1e-15);
    }

    #[test]
    fn rwa_conserves_norm_and_excitations(
        seed in proptest::collection::vec(-1.0f64..1.0, 1..8),
        g in 0.0f64..0.4,
        t0 in -10.0f64..10.0,
        span in 0.0f64..20.0,
        pair in 0usize..6,
    ) {
        let n_max = 8;
        let mut s = random_state(n_max, &seed);
        // the top dressed pair would leave the truncation
        s.set(Qubit::Ground, n_max, c(0.0, 0.0));
        s.set(Qubit::Excited, n_max, c(0.0, 0.0));
        let norm = s.norm();
        s.amplitudes_mut().iter_mut().for_each(|a| *a /= norm);
        let p = RwaParams::new(g, t0, t0 + span, n_max).unwrap();
        let out = evolve_rwa(&s, &p).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-8);

        let mut dressed = JointState::zeros(n_max);
        dressed.set(Qubit::Excited, pair, c(0.6, 0.0));
        dressed.set(Qubit::Ground, pair + 1, c(0.0, 0.8));
        let out = evolve_rwa(&dressed, &p).unwrap();
        let inside = out.population(Qubit::Excited, pair) + out.population(Qubit::Ground, pair + 1);
        prop_assert!((inside - 1.0).abs() < 1e-8);
    }
}
