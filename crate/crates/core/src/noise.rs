//! Dephasing from a randomly wandering atomic frequency.
//!
//! The atomic frequency follows a bounded random walk around `Ω0`
//! ([`noise_step`]); the Rabi Hamiltonian with that frequency, held constant
//! over each step `dt`, is integrated for a pure state without any
//! dissipators. Averaging many runs plays the role of the dephasing
//! reservoir.

use crate::ensemble;
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CMatrix, SparseOp, C64, I};
use crate::master::check_sample;
use crate::observables::{ObservableSeries, Observables};
use crate::operators::{atom_ops, rabi_hamiltonian};
use crate::params::SimParams;
use crate::rng::{stream_rng, uniform_symmetric};
use crate::state::StateVector;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Largest `g·dt` accepted.
pub const MAX_G_DT: f64 = 1e-2;

/// Norm drift tolerated over a full stochastic run.
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCfg {
    /// Mean atomic frequency `Ω0`, also the starting value.
    pub omega0_mean: f64,
    /// Maximum shift scale `ε`.
    pub epsilon: f64,
    /// Noise-frequency knob `x`; larger means faster wandering.
    pub x: f64,
    /// Step of the random walk and of the piecewise-constant Hamiltonian.
    pub dt: f64,
    pub t_end: f64,
    pub n_runs: usize,
    pub master_seed: u64,
    /// Use `|r|` in the two outer branches so they always push back toward
    /// `Ω0`. Off reproduces the update rule with `r ∈ (−1, 1)` everywhere.
    pub outer_branch_abs_r: bool,
    /// Record observables every this many steps.
    pub sample_every: usize,
    /// Dimensionless-time scale for the `tau` column.
    pub xi: f64,
    /// Population allowed in the two highest Fock levels.
    pub trunc_tol: f64,
}

impl Default for NoiseCfg {
    fn default() -> Self {
        Self {
            omega0_mean: 1.0,
            epsilon: 6e-2,
            x: 6.0,
            dt: 0.05,
            t_end: 1000.0,
            n_runs: 500,
            master_seed: 0,
            outer_branch_abs_r: false,
            sample_every: 200,
            xi: 0.1,
            trunc_tol: 1e-6,
        }
    }
}

impl NoiseCfg {
    /// Number of `dt` steps in a run.
    pub fn n_steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("xi", self.xi),
            ("trunc_tol", self.trunc_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(Error::invalid(format!(
                "x must be non-negative, got {}",
                self.x
            )));
        }
        if !self.omega0_mean.is_finite() {
            return Err(Error::invalid("omega0_mean must be finite"));
        }
        if self.n_runs < 1 {
            return Err(Error::invalid("n_runs must be at least 1"));
        }
        if self.sample_every < 1 {
            return Err(Error::invalid("sample_every must be at least 1"));
        }
        if self.n_steps() < 1 {
            return Err(Error::invalid("t_end is shorter than one step"));
        }
        if self.epsilon > 0.1 * self.omega0_mean.abs() {
            log::warn!(
                "epsilon = {} is not small compared to omega0_mean = {}",
                self.epsilon,
                self.omega0_mean
            );
        }
        Ok(())
    }

    /// Validation that also checks `g·dt` against [`MAX_G_DT`].
    pub fn validate_for(&self, params: &SimParams) -> Result<()> {
        self.validate()?;
        params.validate()?;
        if params.g * self.dt > MAX_G_DT {
            return Err(Error::invalid(format!(
                "g*dt = {} exceeds {MAX_G_DT}",
                params.g * self.dt
            )));
        }
        Ok(())
    }
}

/// One update of the atomic frequency.
///
/// Below the band `Ω0 − 0.8ε` the shift is `+0.1εx·r`, above `Ω0 + 0.8ε` it
/// is `−0.1εx·r`, and inside the band `0.1εx·(r − 1/2)`, with `r ∈ (−1, 1)`.
pub fn noise_step(omega0_t: f64, cfg: &NoiseCfg, r: f64) -> f64 {
    let scale = 0.1 * cfg.epsilon * cfg.x;
    let edge = 0.8 * cfg.epsilon;
    let outer = if cfg.outer_branch_abs_r { r.abs() } else { r };
    if omega0_t < cfg.omega0_mean - edge {
        omega0_t + scale * outer
    } else if omega0_t > cfg.omega0_mean + edge {
        omega0_t - scale * outer
    } else {
        omega0_t + scale * (r - 0.5)
    }
}

/// Atomic frequency sampled at `t_k = k·dt`, `k = 0..n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub dt: f64,
    pub omega0: Vec<f64>,
}

impl NoisePath {
    pub fn len(&self) -> usize {
        self.omega0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega0.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.omega0.len()).map(move |k| k as f64 * self.dt)
    }
}

/// Frequency path of run `index`, starting at `Ω0`.
pub fn generate_noise_path(cfg: &NoiseCfg, index: u64) -> NoisePath {
    let n = cfg.n_steps();
    let mut rng = stream_rng(cfg.master_seed, index);
    let mut omega0 = Vec::with_capacity(n);
    let mut w = cfg.omega0_mean;
    for _ in 0..n {
        omega0.push(w);
        w = noise_step(w, cfg, uniform_symmetric(&mut rng));
    }
    NoisePath { dt: cfg.dt, omega0 }
}

/// `ψ ← exp(−i(H_rest + (ω0/2)σ_z)·dt) ψ` by a Taylor series summed to
/// machine precision, substepped so each substep has `‖H‖·h ≤ 1/2`.
struct Propagator {
    h_rest: SparseOp,
    sz: Vec<f64>,
    bound: f64,
    term: Vec<C64>,
    next: Vec<C64>,
}

impl Propagator {
    fn new(h_rest: SparseOp, sz: Vec<f64>) -> Self {
        let dim = sz.len();
        let bound = h_rest.norm_inf();
        Self {
            h_rest,
            sz,
            bound,
            term: vec![C64::zero(); dim],
            next: vec![C64::zero(); dim],
        }
    }

    fn step(&mut self, psi: &mut [C64], omega0: f64, dt: f64) {
        let half_w = 0.5 * omega0;
        let norm = self.bound + half_w.abs();
        let substeps = libm::ceil(norm * dt / 0.5).max(1.0) as usize;
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            self.term.copy_from_slice(psi);
            for k in 1..=60 {
                self.h_rest.mul_vec(&self.term, &mut self.next);
                for ((o, &s), &x) in self.next.iter_mut().zip(&self.sz).zip(&self.term) {
                    *o += x * (half_w * s);
                }
                let c = -I * (h / k as f64);
                let mut size = 0.0;
                for ((t, n), p) in self.term.iter_mut().zip(&self.next).zip(psi.iter_mut()) {
                    *t = n * c;
                    *p += *t;
                    size += t.norm_sqr();
                }
                if size < 1e-34 {
                    break;
                }
            }
        }
    }
}

/// Runs one stochastic realization: path `index` drives the atomic
/// frequency of the closed Rabi model. `params.omega0` is ignored.
pub fn evolve_stochastic(
    psi0: &StateVector,
    params: &SimParams,
    cfg: &NoiseCfg,
    index: u64,
) -> Result<ObservableSeries> {
    let path = generate_noise_path(cfg, index);
    evolve_on_path(psi0, params, cfg, &path)
}

/// Like [`evolve_stochastic`] with an explicit frequency path.
pub fn evolve_on_path(
    psi0: &StateVector,
    params: &SimParams,
    cfg: &NoiseCfg,
    path: &NoisePath,
) -> Result<ObservableSeries> {
    cfg.validate_for(params)?;
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("initial state must have unit norm"));
    }
    let space = psi0.space();
    let dim = space.dim();
    let (sz_op, _, _) = atom_ops(space);
    let sz: Vec<f64> = (0..dim).map(|i| sz_op.get(i, i).re).collect();
    let rest_params = SimParams {
        omega0: 0.0,
        ..*params
    };
    let h_rest = rabi_hamiltonian(&rest_params, space);
    let mut obs = Observables::new(&h_rest);
    let with_freq = |w: f64| -> SparseOp {
        let shift = CMatrix::from_fn(dim, |i, j| {
            if i == j {
                C64::new(0.5 * w * sz[i], 0.0)
            } else {
                C64::zero()
            }
        });
        SparseOp::from_dense(&(h_rest.matrix() + &shift))
    };
    let mut prop = Propagator::new(h_rest.to_sparse(), sz.clone());

    let n = path.len();
    let mut psi = psi0.amplitudes().to_vec();
    let mut series = ObservableSeries::with_capacity(n / cfg.sample_every + 2);
    let mut last_good = None;
    let mut sample = 0;
    let mut record =
        |psi: &[C64], step: usize, w: f64, series: &mut ObservableSeries| -> Result<()> {
            let t = step as f64 * path.dt;
            let deviation = (libm::sqrt(norm_sqr(psi)) - 1.0).abs();
            if deviation > UNITARITY_TOL {
                return Err(Error::NormDrift { t, deviation });
            }
            obs.set_hamiltonian(with_freq(w));
            let rec = obs.of_pure(psi, t, cfg.xi * t);
            check_sample(&rec, sample, cfg.trunc_tol, last_good)?;
            last_good = Some(rec.tau);
            sample += 1;
            series.push(rec);
            Ok(())
        };

    record(
        &psi,
        0,
        path.omega0.first().copied().unwrap_or(cfg.omega0_mean),
        &mut series,
    )?;
    for (k, &w) in path.omega0.iter().enumerate() {
        prop.step(&mut psi, w, path.dt);
        let step = k + 1;
        if step % cfg.sample_every == 0 || step == n {
            let w_now = path.omega0.get(step).copied().unwrap_or(w);
            record(&psi, step, w_now, &mut series)?;
        }
    }
    Ok(series)
}

/// Pointwise mean and standard error over `cfg.n_runs` runs, sequentially.
pub fn ensemble_average_stochastic(
    psi0: &StateVector,
    params: &SimParams,
    cfg: &NoiseCfg,
) -> Result<(ObservableSeries, ObservableSeries)> {
    cfg.validate_for(params)?;
    let runs = (0..cfg.n_runs as u64)
        .map(|i| evolve_stochastic(psi0, params, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    ensemble::reduce(&runs)
}
