//! Quantum-jump unraveling of the dephasing channel.
//!
//! The jump operator is `√γ_ph σ_z`. Because `σ_z†σ_z = 𝕀`, the
//! non-Hermitian drift `H − i(γ_ph/2)𝕀` only rescales the norm: the
//! normalized state evolves under `H` alone and the waiting time between
//! jumps is exponential with rate `γ_ph`, independent of the state. Waiting
//! times are therefore drawn directly and the state is propagated
//! unitarily between them. A jump flips the sign of the ground-state
//! amplitudes, which preserves the norm exactly.
//!
//! Unitary segments use the adaptive integrator by default. For a real
//! symmetric Hamiltonian (all the models here) [`Propagation::Spectral`]
//! applies `exp(−iHt)` from one eigendecomposition instead, which is exact
//! and much faster for large ensembles.

use crate::ensemble;
use crate::error::{Error, Result};
use crate::integrator::{Dopri5, IntegratorCfg};
use crate::linalg::{norm_sqr, SpectralPropagator, C64, I};
use crate::master::{check_sample, TimeGrid};
use crate::observables::{ObservableSeries, Observables};
use crate::operators::QOperator;
use crate::rng::{exponential, stream_rng};
use crate::space::Level;
use crate::state::StateVector;
use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

/// Norm drift tolerated between renormalizations.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

/// How the state is carried between jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// Dormand–Prince on the Schrödinger equation.
    #[default]
    Adaptive,
    /// Exact exponential via the eigenbasis of a real symmetric `H`.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryCfg {
    pub master_seed: u64,
    pub n_traj: usize,
    pub grid: TimeGrid,
    pub integrator: IntegratorCfg,
    pub propagation: Propagation,
}

impl TrajectoryCfg {
    pub fn validate(&self) -> Result<()> {
        if self.n_traj < 1 {
            return Err(Error::invalid("n_traj must be at least 1"));
        }
        self.grid.validate()?;
        self.integrator.validate()
    }
}

/// One unraveled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub series: ObservableSeries,
    pub jump_times: Vec<f64>,
}

fn check_norm(psi: &[C64], t: f64) -> Result<()> {
    let deviation = (libm::sqrt(norm_sqr(psi)) - 1.0).abs();
    if deviation > NORM_DRIFT_TOL {
        return Err(Error::NormDrift { t, deviation });
    }
    Ok(())
}

fn renormalize(psi: &mut [C64]) {
    let inv = 1.0 / libm::sqrt(norm_sqr(psi));
    psi.iter_mut().for_each(|z| *z *= inv);
}

enum Segment {
    Adaptive {
        h: crate::linalg::SparseOp,
        stepper: Box<Dopri5>,
    },
    Spectral(SpectralPropagator),
}

impl Segment {
    fn new(hamiltonian: &QOperator, cfg: &TrajectoryCfg) -> Result<Self> {
        Ok(match cfg.propagation {
            Propagation::Adaptive => Segment::Adaptive {
                h: hamiltonian.to_sparse(),
                stepper: Box::new(Dopri5::new(cfg.integrator, hamiltonian.space().dim())),
            },
            Propagation::Spectral => {
                Segment::Spectral(SpectralPropagator::new(hamiltonian.matrix()).ok_or_else(
                    || Error::invalid("spectral propagation needs a real symmetric Hamiltonian"),
                )?)
            }
        })
    }

    fn advance(&mut self, t: &mut f64, t_end: f64, psi: &mut [C64]) -> Result<()> {
        match self {
            Segment::Adaptive { h, stepper } => {
                let mut rhs = |_t: f64, psi: &[C64], out: &mut [C64]| {
                    h.mul_vec(psi, out);
                    out.iter_mut().for_each(|z| *z *= -I);
                };
                stepper.advance(t, t_end, psi, &mut rhs, &mut |_: &mut [C64]| {})
            }
            Segment::Spectral(prop) => {
                if t_end > *t {
                    prop.propagate(psi, t_end - *t);
                    *t = t_end;
                }
                Ok(())
            }
        }
    }

    fn invalidate(&mut self) {
        if let Segment::Adaptive { stepper, .. } = self {
            stepper.invalidate();
        }
    }
}

/// Runs trajectory `index` of the ensemble keyed by `cfg.master_seed`.
pub fn run_trajectory(
    psi0: &StateVector,
    hamiltonian: &QOperator,
    gamma_ph: f64,
    cfg: &TrajectoryCfg,
    index: u64,
) -> Result<Trajectory> {
    let grid = &cfg.grid;
    grid.validate()?;
    cfg.integrator.validate()?;
    if !(gamma_ph >= 0.0 && gamma_ph.is_finite()) {
        return Err(Error::invalid(format!(
            "gamma_ph must be non-negative, got {gamma_ph}"
        )));
    }
    let space = hamiltonian.space();
    if psi0.space() != space {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi0.space().dim(),
        });
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("initial state must have unit norm"));
    }

    let dim = space.dim();
    let obs = Observables::new(hamiltonian);
    let ground: Vec<bool> = (0..dim)
        .map(|i| space.decompose(i).0 == Level::Ground)
        .collect();
    let mut segment = Segment::new(hamiltonian, cfg)?;
    let mut rng = stream_rng(cfg.master_seed, index);

    let mut psi = psi0.amplitudes().to_vec();
    let mut t = 0.0;
    let mut next_jump = exponential(&mut rng, gamma_ph);
    let mut jumps = Vec::new();
    let mut series = ObservableSeries::with_capacity(grid.n_samples);
    let mut last_good = None;

    for k in 0..grid.n_samples {
        let target = grid.t(k);
        while next_jump <= target {
            segment.advance(&mut t, next_jump, &mut psi)?;
            check_norm(&psi, t)?;
            let before = norm_sqr(&psi);
            for (z, &g) in psi.iter_mut().zip(&ground) {
                if g {
                    *z = -*z;
                }
            }
            debug_assert!((norm_sqr(&psi) - before).abs() <= 1e-14);
            renormalize(&mut psi);
            segment.invalidate();
            jumps.push(next_jump);
            next_jump += exponential(&mut rng, gamma_ph);
        }
        segment.advance(&mut t, target, &mut psi)?;
        check_norm(&psi, t)?;
        renormalize(&mut psi);
        segment.invalidate();
        let rec = obs.of_pure(&psi, target, grid.xi * target);
        check_sample(&rec, k, cfg.integrator.trunc_tol, last_good)?;
        last_good = Some(rec.tau);
        series.push(rec);
    }
    Ok(Trajectory {
        series,
        jump_times: jumps,
    })
}

/// Pointwise ensemble mean and standard error over `cfg.n_traj`
/// trajectories, run one after another.
pub fn average_trajectories(
    psi0: &StateVector,
    hamiltonian: &QOperator,
    gamma_ph: f64,
    cfg: &TrajectoryCfg,
) -> Result<(ObservableSeries, ObservableSeries)> {
    cfg.validate()?;
    let runs = (0..cfg.n_traj as u64)
        .map(|i| run_trajectory(psi0, hamiltonian, gamma_ph, cfg, i).map(|tr| tr.series))
        .collect::<Result<Vec<_>>>()?;
    ensemble::reduce(&runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::{evolve, DensityMatrix};
    use crate::operators::rabi_hamiltonian;
    use crate::space::build_space;
    use crate::state::{prepare_state, StateSpec};
    use crate::SimParams;

    fn traj_cfg(seed: u64, grid: TimeGrid, integrator: IntegratorCfg) -> TrajectoryCfg {
        TrajectoryCfg {
            master_seed: seed,
            n_traj: 1,
            grid,
            integrator,
            propagation: Propagation::Adaptive,
        }
    }

    #[test]
    fn no_dephasing_means_no_jumps_and_unitary_evolution() {
        let space = build_space(12).unwrap();
        let p = SimParams::resonant(0.1);
        let h = rabi_hamiltonian(&p, space);
        let psi = prepare_state(&StateSpec::ground_fock(2), space).unwrap();
        let grid = TimeGrid::new(30.0, 16, 0.1).unwrap();
        let cfg = IntegratorCfg::default().with_tolerances(1e-11, 1e-10);
        let tr = run_trajectory(&psi, &h, 0.0, &traj_cfg(5, grid, cfg), 0).unwrap();
        assert!(tr.jump_times.is_empty());

        let (me, _) = evolve(&DensityMatrix::from_pure(&psi), &h, &p, &grid, &cfg).unwrap();
        for (a, b) in tr.series.iter().zip(&me) {
            assert!((a.n_mean - b.n_mean).abs() < 1e-7);
            assert!((a.energy_mean - b.energy_mean).abs() < 1e-7);
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let space = build_space(16).unwrap();
        let h = rabi_hamiltonian(&SimParams::resonant(0.1), space);
        let psi = prepare_state(&StateSpec::ground_fock(1), space).unwrap();
        let grid = TimeGrid::new(40.0, 9, 0.1).unwrap();
        let cfg = traj_cfg(11, grid, IntegratorCfg::default());
        let a = run_trajectory(&psi, &h, 0.1, &cfg, 3).unwrap();
        let b = run_trajectory(&psi, &h, 0.1, &cfg, 3).unwrap();
        let c = run_trajectory(&psi, &h, 0.1, &cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.jump_times, c.jump_times);
        assert!(a.jump_times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_member_ensemble_has_zero_error() {
        let space = build_space(12).unwrap();
        let h = rabi_hamiltonian(&SimParams::resonant(0.1), space);
        let psi = prepare_state(&StateSpec::ground(), space).unwrap();
        let cfg = traj_cfg(
            1,
            TimeGrid::new(20.0, 5, 0.1).unwrap(),
            IntegratorCfg::default(),
        );
        let (mean, err) = average_trajectories(&psi, &h, 0.1, &cfg).unwrap();
        let single = run_trajectory(&psi, &h, 0.1, &cfg, 0).unwrap();
        assert_eq!(mean.n_means(), single.series.n_means());
        assert!(err.iter().all(|r| r.n_mean == 0.0 && r.p_e == 0.0));
    }

    #[test]
    fn rejects_unnormalized_input() {
        let space = build_space(3).unwrap();
        let h = rabi_hamiltonian(&SimParams::resonant(0.1), space);
        let mut psi = prepare_state(&StateSpec::ground(), space).unwrap();
        psi.amplitudes_mut()[0] = C64::new(2.0, 0.0);
        let grid = TimeGrid::new(1.0, 2, 0.1).unwrap();
        let r = run_trajectory(
            &psi,
            &h,
            0.1,
            &traj_cfg(0, grid, IntegratorCfg::default()),
            0,
        );
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn spectral_and_adaptive_segments_agree() {
        let space = build_space(24).unwrap();
        let h = rabi_hamiltonian(&SimParams::resonant(0.1), space);
        let psi = prepare_state(&StateSpec::ground_fock(3), space).unwrap();
        let grid = TimeGrid::new(60.0, 13, 0.1).unwrap();
        let mut cfg = traj_cfg(
            21,
            grid,
            IntegratorCfg::default().with_tolerances(1e-12, 1e-11),
        );
        let a = run_trajectory(&psi, &h, 0.2, &cfg, 7).unwrap();
        cfg.propagation = Propagation::Spectral;
        let b = run_trajectory(&psi, &h, 0.2, &cfg, 7).unwrap();
        assert_eq!(a.jump_times, b.jump_times);
        assert!(!a.jump_times.is_empty());
        for (x, y) in a.series.iter().zip(&b.series) {
            assert!((x.n_mean - y.n_mean).abs() < 1e-8);
            assert!((x.sigma_z_mean - y.sigma_z_mean).abs() < 1e-8);
        }
    }

    #[test]
    fn spectral_rejects_complex_hamiltonian() {
        let space = build_space(2).unwrap();
        let (_, sp, _) = crate::operators::atom_ops(space);
        let y = &sp.matrix().scale(-I) + &sp.adjoint().matrix().scale(I);
        let h = QOperator::new(space, y, true);
        let psi = prepare_state(&StateSpec::ground(), space).unwrap();
        let mut cfg = traj_cfg(
            0,
            TimeGrid::new(1.0, 2, 0.1).unwrap(),
            IntegratorCfg::default(),
        );
        cfg.propagation = Propagation::Spectral;
        assert!(run_trajectory(&psi, &h, 0.1, &cfg, 0).is_err());
    }
}
