use rabi_core::integrator::IntegratorCfg;
use rabi_core::noise::{ensemble_average_stochastic, NoiseCfg};
use rabi_core::operators::Coupling;
use rabi_core::space::build_space;
use rabi_core::state::prepare_state;
use rabi_core::trajectory::{average_trajectories, run_trajectory, Propagation, TrajectoryCfg};
use rabi_core::{evolve, DensityMatrix, ObservableSeries, SimParams, StateSpec, TimeGrid};

// The blocks these tests touch fit entirely below the cutoff.
fn unguarded() -> IntegratorCfg {
    IntegratorCfg {
        trunc_tol: f64::INFINITY,
        ..IntegratorCfg::default()
    }
}

fn tight() -> IntegratorCfg {
    unguarded().with_tolerances(1e-12, 1e-10)
}

fn run(
    p: &SimParams,
    c: Coupling,
    n_max: usize,
    init: StateSpec,
    grid: TimeGrid,
) -> ObservableSeries {
    let space = build_space(n_max).unwrap();
    let h = c.hamiltonian(p, space);
    let rho0 = DensityMatrix::from_pure(&prepare_state(&init, space).unwrap());
    evolve(&rho0, &h, p, &grid, &tight()).unwrap().0
}

#[test]
fn vacuum_rabi_oscillation() {
    let p = SimParams::resonant(0.2);
    let s = run(
        &p,
        Coupling::JaynesCummings,
        2,
        StateSpec::excited(),
        TimeGrid::new(40.0, 81, 1.0).unwrap(),
    );
    for r in s.iter() {
        let exact = (p.g * r.t).cos().powi(2);
        assert!(
            (r.p_e - exact).abs() < 1e-8,
            "t = {}: {} vs {exact}",
            r.t,
            r.p_e
        );
        assert!((r.quanta_mean - 1.0).abs() < 1e-9);
    }
}

#[test]
fn atom_relaxes_to_thermal_population() {
    let (gamma, n_t) = (0.1, 0.5);
    let p = SimParams {
        n_t,
        ..SimParams::resonant(0.0).with_rates(0.0, gamma, 0.0)
    };
    let s = run(
        &p,
        Coupling::Rabi,
        1,
        StateSpec::excited(),
        TimeGrid::new(30.0, 31, 1.0).unwrap(),
    );
    let p_inf = n_t / (2.0 * n_t + 1.0);
    for r in s.iter() {
        let exact = p_inf + (1.0 - p_inf) * (-gamma * (2.0 * n_t + 1.0) * r.t).exp();
        assert!((r.p_e - exact).abs() < 1e-8, "t = {}", r.t);
    }
}

#[test]
fn cavity_fills_to_thermal_occupation() {
    let (kappa, n_t) = (0.2, 0.2);
    let p = SimParams {
        n_t,
        ..SimParams::resonant(0.0).with_rates(0.0, 0.0, kappa)
    };
    let s = run(
        &p,
        Coupling::Rabi,
        20,
        StateSpec::ground(),
        TimeGrid::new(30.0, 31, 1.0).unwrap(),
    );
    for r in s.iter() {
        let exact = n_t * (1.0 - (-kappa * r.t).exp());
        assert!((r.n_mean - exact).abs() < 1e-8, "t = {}", r.t);
    }
    let last = s.last().unwrap();
    let q = last.mandel_q.unwrap();
    assert!(
        (q - last.n_mean).abs() < 1e-6,
        "thermal light has q = <n>, got {q}"
    );
}

#[test]
fn dephasing_leaves_populations_alone() {
    let p = SimParams::resonant(0.0).with_rates(0.3, 0.0, 0.0);
    let init = StateSpec::new(
        rabi_core::AtomState::Superposition,
        rabi_core::FieldState::Fock(1),
    );
    let s = run(
        &p,
        Coupling::Rabi,
        2,
        init,
        TimeGrid::new(20.0, 11, 1.0).unwrap(),
    );
    assert!(s
        .iter()
        .all(|r| (r.p_e - 0.5).abs() < 1e-10 && (r.n_mean - 1.0).abs() < 1e-10));
}

fn traj_cfg(n_traj: usize, grid: TimeGrid) -> TrajectoryCfg {
    TrajectoryCfg {
        master_seed: 11,
        n_traj,
        grid,
        integrator: unguarded(),
        propagation: Propagation::Spectral,
    }
}

#[test]
fn trajectory_average_reproduces_the_master_equation() {
    let p = SimParams::resonant(0.3).with_rates(0.2, 0.0, 0.0);
    let grid = TimeGrid::new(15.0, 16, 1.0).unwrap();
    let space = build_space(3).unwrap();
    let h = Coupling::JaynesCummings.hamiltonian(&p, space);
    let psi = prepare_state(&StateSpec::excited(), space).unwrap();
    let me = run(&p, Coupling::JaynesCummings, 3, StateSpec::excited(), grid);
    let (mean, err) = average_trajectories(&psi, &h, p.gamma_ph, &traj_cfg(3000, grid)).unwrap();
    for ((m, e), r) in mean.iter().zip(err.iter()).zip(me.iter()) {
        let diff = (m.p_e - r.p_e).abs();
        assert!(
            diff <= 4.0 * e.p_e + 1e-9,
            "t = {}: {} vs {} (se {})",
            r.t,
            m.p_e,
            r.p_e,
            e.p_e
        );
    }
}

#[test]
fn jump_counts_have_poisson_mean_and_variance() {
    let p = SimParams::resonant(0.1).with_rates(0.5, 0.0, 0.0);
    let grid = TimeGrid::new(20.0, 3, 1.0).unwrap();
    let space = build_space(2).unwrap();
    let h = Coupling::JaynesCummings.hamiltonian(&p, space);
    let psi = prepare_state(&StateSpec::ground(), space).unwrap();
    let cfg = traj_cfg(4000, grid);
    let counts: Vec<f64> = (0..cfg.n_traj as u64)
        .map(|i| {
            run_trajectory(&psi, &h, p.gamma_ph, &cfg, i)
                .unwrap()
                .jump_times
                .len() as f64
        })
        .collect();
    let n = counts.len() as f64;
    let lambda = p.gamma_ph * grid.t_end;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(
        (mean - lambda).abs() < 4.0 * (lambda / n).sqrt(),
        "mean {mean}"
    );
    assert!(
        (var - lambda).abs() < 4.0 * ((lambda + 2.0 * lambda * lambda) / n).sqrt(),
        "var {var}"
    );
}

#[test]
fn uncoupled_atom_never_makes_photons_under_frequency_noise() {
    let p = SimParams::resonant(0.0);
    let space = build_space(3).unwrap();
    let psi = prepare_state(&StateSpec::ground(), space).unwrap();
    let cfg = NoiseCfg {
        t_end: 50.0,
        n_runs: 8,
        sample_every: 100,
        ..NoiseCfg::default()
    };
    let (mean, _) = ensemble_average_stochastic(&psi, &p, &cfg).unwrap();
    assert_eq!(mean.len(), 11);
    assert!(mean
        .iter()
        .all(|r| r.n_mean == 0.0 && (r.sigma_z_mean + 1.0).abs() < 1e-12));
}
