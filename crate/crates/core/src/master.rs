//! Lindblad master equation
//!
//! `dρ/dt = −i[H, ρ] + L_a(ρ) + L_f(ρ) + L_d(ρ)` with thermal atomic damping
//! (rate `γ`), thermal cavity damping (`κ`), both at thermal occupation
//! `n_t`, and atomic dephasing `L_d(ρ) = γ_ph(σ_z ρ σ_z − ρ)`.

use crate::error::{Error, Result};
use crate::integrator::{Dopri5, IntegratorCfg};
use crate::linalg::{CMatrix, SparseOp, C64, I};
use crate::observables::{ObservableRecord, ObservableSeries, Observables};
use crate::operators::{atom_ops, field_ops, QOperator};
use crate::params::SimParams;
use crate::space::HilbertSpace;
use crate::state::StateVector;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Largest trace deviation tolerated at any sample.
pub const TRACE_TOL: f64 = 1e-6;

/// Mixed state on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, rho: CMatrix) -> Result<Self> {
        if rho.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: rho.dim(),
            });
        }
        Ok(Self { space, rho })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let rho = CMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj());
        Self {
            space: psi.space(),
            rho,
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// Checks unit trace (within [`TRACE_TOL`]) and Hermiticity (1e-9).
    pub fn validate(&self) -> Result<()> {
        let dev = (self.trace() - C64::new(1.0, 0.0)).norm();
        if dev > TRACE_TOL {
            return Err(Error::invalid(format!(
                "density matrix trace off by {dev:e}"
            )));
        }
        let defect = self.rho.hermiticity_defect();
        if defect > 1e-9 {
            return Err(Error::invalid(format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        Ok(())
    }
}

/// `ρ ← (ρ + ρ†)/2` on a row-major buffer.
pub fn symmetrize(rho: &mut [C64], dim: usize) {
    for i in 0..dim {
        rho[i * dim + i].im = 0.0;
        for j in i + 1..dim {
            let avg = (rho[i * dim + j] + rho[j * dim + i].conj()) * 0.5;
            rho[i * dim + j] = avg;
            rho[j * dim + i] = avg.conj();
        }
    }
}

/// Uniform sample grid `t_k = k·t_end/(n_samples − 1)`, reported both in
/// time and in dimensionless time `τ = ξ·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub n_samples: usize,
    pub xi: f64,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_samples: usize, xi: f64) -> Result<Self> {
        let grid = Self {
            t_end,
            n_samples,
            xi,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid covering `τ ∈ [0, tau_end]`.
    pub fn from_tau(tau_end: f64, n_samples: usize, xi: f64) -> Result<Self> {
        Self::new(tau_end / xi, n_samples, xi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::invalid(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        Ok(())
    }

    pub fn t(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_end * k as f64 / (self.n_samples - 1) as f64
        }
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.xi * self.t(k)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.t(k)).collect()
    }

    pub fn tau_end(&self) -> f64 {
        self.xi * self.t_end
    }
}

#[derive(Debug, Clone)]
struct Channel {
    rate: f64,
    op: SparseOp,
    op_adj: SparseOp,
}

/// Sparse Lindblad generator for one Hamiltonian and parameter set.
///
/// The anticommutator terms are folded into `H_eff = H − (i/2) Σ r L†L`, so
/// applying the generator costs two sparse-dense products for the drift
/// plus two per dissipation channel.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    h_eff: SparseOp,
    h_eff_adj: SparseOp,
    channels: Vec<Channel>,
}

impl Liouvillian {
    pub fn new(hamiltonian: &QOperator, params: &SimParams) -> Self {
        let space = hamiltonian.space();
        let (a, a_dag, _) = field_ops(space);
        let (sz, sp, sm) = atom_ops(space);
        let n_t = params.n_t;
        let candidates = [
            (params.gamma * (n_t + 1.0), sm),
            (params.gamma * n_t, sp),
            (params.kappa * (n_t + 1.0), a),
            (params.kappa * n_t, a_dag),
            (params.gamma_ph, sz),
        ];

        let mut h_eff = hamiltonian.matrix().clone();
        let mut channels = Vec::new();
        for (rate, op) in candidates {
            if rate == 0.0 {
                continue;
            }
            let ldl = op.adjoint().compose(&op);
            h_eff = &h_eff - &ldl.matrix().scale(C64::new(0.0, 0.5 * rate));
            channels.push(Channel {
                rate,
                op: op.to_sparse(),
                op_adj: op.adjoint().to_sparse(),
            });
        }
        Self {
            dim: space.dim(),
            h_eff: SparseOp::from_dense(&h_eff),
            h_eff_adj: SparseOp::from_dense(&h_eff.adjoint()),
            channels,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = L(ρ)` for row-major `rho`. `scratch` must hold `dim²` entries.
    pub fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::zero());
        self.h_eff.left_mul_acc(-I, rho, out);
        self.h_eff_adj.right_mul_acc(I, rho, out);
        for ch in &self.channels {
            scratch.iter_mut().for_each(|z| *z = C64::zero());
            ch.op.left_mul_acc(C64::new(1.0, 0.0), rho, scratch);
            ch.op_adj
                .right_mul_acc(C64::new(ch.rate, 0.0), scratch, out);
        }
    }
}

/// Right-hand side of the master equation at `rho`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    hamiltonian: &QOperator,
    params: &SimParams,
) -> Result<CMatrix> {
    if rho.space() != hamiltonian.space() {
        return Err(Error::DimensionMismatch {
            expected: hamiltonian.dim(),
            found: rho.space().dim(),
        });
    }
    let l = Liouvillian::new(hamiltonian, params);
    let n = l.dim();
    let mut out = vec![C64::zero(); n * n];
    let mut scratch = vec![C64::zero(); n * n];
    l.apply(rho.matrix().as_slice(), &mut out, &mut scratch);
    Ok(CMatrix::from_row_major(n, out))
}

/// All observables of `rho` with `⟨H⟩` taken against `hamiltonian`.
pub fn observables(
    rho: &DensityMatrix,
    hamiltonian: &QOperator,
    t: f64,
    tau: f64,
) -> ObservableRecord {
    Observables::new(hamiltonian).of_density(rho.matrix().as_slice(), t, tau)
}

/// Sample-time checks shared by the master-equation and trajectory solvers.
pub(crate) fn check_sample(
    rec: &ObservableRecord,
    sample: usize,
    trunc_tol: f64,
    last_good_tau: Option<f64>,
) -> Result<()> {
    if rec.top_level_pop > trunc_tol {
        return Err(Error::TruncationExceeded {
            sample,
            t: rec.t,
            tau: rec.tau,
            population: rec.top_level_pop,
            tolerance: trunc_tol,
            last_good_tau,
        });
    }
    Ok(())
}

/// Integrates the master equation over `grid` and returns the sampled
/// observables together with the final state.
///
/// Aborts when the trace drifts by more than [`TRACE_TOL`] or when the two
/// highest Fock levels hold more than `cfg.trunc_tol`.
pub fn evolve(
    rho0: &DensityMatrix,
    hamiltonian: &QOperator,
    params: &SimParams,
    grid: &TimeGrid,
    cfg: &IntegratorCfg,
) -> Result<(ObservableSeries, DensityMatrix)> {
    params.validate()?;
    grid.validate()?;
    cfg.validate()?;
    rho0.validate()?;
    if rho0.space() != hamiltonian.space() {
        return Err(Error::DimensionMismatch {
            expected: hamiltonian.dim(),
            found: rho0.space().dim(),
        });
    }

    let space = rho0.space();
    let dim = space.dim();
    let generator = Liouvillian::new(hamiltonian, params);
    let obs = Observables::new(hamiltonian);
    let mut y = rho0.matrix().as_slice().to_vec();
    let mut scratch = vec![C64::zero(); dim * dim];
    let mut rhs = |_t: f64, rho: &[C64], out: &mut [C64]| generator.apply(rho, out, &mut scratch);
    let mut post = |rho: &mut [C64]| symmetrize(rho, dim);
    let mut stepper = Dopri5::new(*cfg, dim * dim);

    let mut series = ObservableSeries::with_capacity(grid.n_samples);
    let mut t = 0.0;
    let mut last_good = None;
    for k in 0..grid.n_samples {
        let target = grid.t(k);
        stepper.advance(&mut t, target, &mut y, &mut rhs, &mut post)?;
        let rec = obs.of_density(&y, target, grid.xi * target);
        if rec.trace_error > TRACE_TOL {
            return Err(Error::TraceDrift {
                t: target,
                deviation: rec.trace_error,
            });
        }
        check_sample(&rec, k, cfg.trunc_tol, last_good)?;
        last_good = Some(rec.tau);
        series.push(rec);
    }
    let rho = DensityMatrix {
        space,
        rho: CMatrix::from_row_major(dim, y),
    };
    Ok((series, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{jc_hamiltonian, rabi_hamiltonian, Coupling};
    use crate::space::{build_space, Level};
    use crate::state::{prepare_state, StateSpec};

    fn pure(space: HilbertSpace, spec: StateSpec) -> DensityMatrix {
        DensityMatrix::from_pure(&prepare_state(&spec, space).unwrap())
    }

    #[test]
    fn unitary_rhs_is_traceless_commutator() {
        let space = build_space(8).unwrap();
        let p = SimParams::resonant(0.2);
        let h = rabi_hamiltonian(&p, space);
        let rho = pure(space, StateSpec::phi(4).unwrap());
        let rhs = lindblad_rhs(&rho, &h, &p).unwrap();
        let expect = h
            .commutator(&QOperator::new(space, rho.matrix().clone(), true))
            .scale(-I);
        assert!(rhs.max_abs_diff(&expect) < 1e-14);
        assert!(rhs.trace().norm() < 1e-14);
    }

    #[test]
    fn dephasing_decays_atomic_coherence() {
        let space = build_space(2).unwrap();
        let p = SimParams {
            g: 0.0,
            gamma_ph: 0.1,
            ..SimParams::default()
        };
        let h = rabi_hamiltonian(&p, space);
        let rho = pure(space, StateSpec::phi(3).unwrap());
        let rhs = lindblad_rhs(&rho, &h, &p).unwrap();
        let (e, g) = (
            space.index(Level::Excited, 0),
            space.index(Level::Ground, 0),
        );
        // Unitary part contributes −iω0 ρ_eg; dephasing adds −2γ_ph ρ_eg.
        let want = rho.matrix()[(e, g)] * C64::new(-0.2, -1.0);
        assert!((rhs[(e, g)] - want).norm() < 1e-15);
        assert!(rhs.trace().norm() < 1e-15);
    }

    #[test]
    fn thermal_cavity_pumps_vacuum() {
        let space = build_space(3).unwrap();
        let p = SimParams {
            g: 0.0,
            kappa: 0.3,
            n_t: 0.2,
            ..SimParams::default()
        };
        let h = rabi_hamiltonian(&p, space);
        let rho = pure(space, StateSpec::ground());
        let rhs = lindblad_rhs(&rho, &h, &p).unwrap();
        let dn: f64 = (0..space.dim())
            .map(|i| space.photons(i) as f64 * rhs[(i, i)].re)
            .sum();
        assert!((dn - 0.3 * 0.2).abs() < 1e-15);
        assert!(rhs.trace().norm() < 1e-15);
    }

    #[test]
    fn rhs_trace_vanishes_with_all_channels() {
        let space = build_space(8).unwrap();
        let p = SimParams {
            g: 0.15,
            gamma_ph: 0.1,
            gamma: 0.07,
            kappa: 0.05,
            n_t: 0.3,
            ..SimParams::default()
        };
        for c in [
            Coupling::Rabi,
            Coupling::JaynesCummings,
            Coupling::PhaseOperator,
        ] {
            let h = c.hamiltonian(&p, space);
            let rho = pure(space, StateSpec::phi(6).unwrap());
            let rhs = lindblad_rhs(&rho, &h, &p).unwrap();
            assert!(rhs.trace().norm() <= 1e-12);
            assert!(rhs.hermiticity_defect() <= 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = SimParams::resonant(0.1);
        let h = rabi_hamiltonian(&p, build_space(3).unwrap());
        let rho = pure(build_space(4).unwrap(), StateSpec::ground());
        assert!(matches!(
            lindblad_rhs(&rho, &h, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dephasing_without_coupling_creates_nothing() {
        let space = build_space(6).unwrap();
        let p = SimParams {
            g: 0.0,
            gamma_ph: 0.1,
            ..SimParams::default()
        };
        let h = rabi_hamiltonian(&p, space);
        let grid = TimeGrid::new(100.0, 21, 0.1).unwrap();
        let (series, _) = evolve(
            &pure(space, StateSpec::ground()),
            &h,
            &p,
            &grid,
            &IntegratorCfg::default(),
        )
        .unwrap();
        assert!(series.iter().all(|r| r.n_mean.abs() < 1e-10));
    }

    #[test]
    fn truncation_guard_names_sample() {
        let space = build_space(4).unwrap();
        let p = SimParams {
            g: 0.0,
            kappa: 1.0,
            n_t: 5.0,
            ..SimParams::default()
        };
        let h = rabi_hamiltonian(&p, space);
        let grid = TimeGrid::new(10.0, 11, 0.1).unwrap();
        let r = evolve(
            &pure(space, StateSpec::ground()),
            &h,
            &p,
            &grid,
            &IntegratorCfg::default(),
        );
        match r {
            Err(Error::TruncationExceeded {
                sample,
                last_good_tau,
                ..
            }) => {
                assert!(sample >= 1);
                assert_eq!(last_good_tau, Some(grid.tau(sample - 1)));
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn jc_from_vacuum_is_stationary() {
        let space = build_space(5).unwrap();
        let p = SimParams::resonant(0.1).with_rates(0.1, 0.0, 0.0);
        let h = jc_hamiltonian(&p, space);
        let grid = TimeGrid::new(50.0, 6, 0.1).unwrap();
        let (series, _) = evolve(
            &pure(space, StateSpec::ground()),
            &h,
            &p,
            &grid,
            &IntegratorCfg::default(),
        )
        .unwrap();
        assert!(series.iter().all(|r| r.n_mean.abs() < 1e-12));
    }

    #[test]
    fn grid_endpoints() {
        let grid = TimeGrid::from_tau(50.0, 101, 0.1).unwrap();
        assert_eq!(grid.t(0), 0.0);
        assert_eq!(grid.t(100), 500.0);
        assert!((grid.tau(50) - 25.0).abs() < 1e-12);
        assert!(TimeGrid::new(1.0, 1, 0.1).is_err());
        assert!(TimeGrid::new(-1.0, 3, 0.1).is_err());
    }
}
