//! Thread-parallel ensembles and sweeps.
//!
//! Runs are computed on a rayon pool, collected back in index order and
//! reduced with the same index-ordered pairwise sums as the sequential
//! drivers in `rabi-core`, so output is bit-identical for every thread count.

use crate::error::Result;
use rabi_core::analysis::{assemble_sweep, sweep_point, SweepResult, SweepSpec};
use rabi_core::ensemble::reduce;
use rabi_core::noise::{evolve_stochastic, NoiseCfg};
use rabi_core::trajectory::{run_trajectory, Trajectory, TrajectoryCfg};
use rabi_core::{ObservableRecord, ObservableSeries, QOperator, SimParams, StateVector};
use rayon::prelude::*;

/// Pool with `threads` workers; `None` or `Some(0)` uses rayon's default.
pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Mean and standard error of an ensemble, plus per-run extras.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutput {
    pub mean: ObservableSeries,
    pub stderr: ObservableSeries,
    /// Jumps per trajectory; empty for stochastic ensembles.
    pub jump_counts: Vec<usize>,
    /// Largest top-level population seen in any run.
    pub max_top_pop: f64,
    /// Largest `|‖ψ‖² − 1|` seen in any run.
    pub max_trace_error: f64,
}

fn max_of(runs: &[ObservableSeries], f: impl Fn(&ObservableRecord) -> f64) -> f64 {
    runs.iter()
        .flat_map(|s| s.iter().map(&f))
        .fold(0.0, f64::max)
}

pub fn trajectories(
    pool: &rayon::ThreadPool,
    psi0: &StateVector,
    hamiltonian: &QOperator,
    gamma_ph: f64,
    cfg: &TrajectoryCfg,
) -> Result<EnsembleOutput> {
    cfg.validate()?;
    let runs: Vec<Trajectory> = pool.install(|| {
        (0..cfg.n_traj as u64)
            .into_par_iter()
            .map(|i| run_trajectory(psi0, hamiltonian, gamma_ph, cfg, i))
            .collect::<rabi_core::Result<_>>()
    })?;
    let jump_counts = runs.iter().map(|t| t.jump_times.len()).collect();
    let series: Vec<ObservableSeries> = runs.into_iter().map(|t| t.series).collect();
    let (mean, stderr) = reduce(&series)?;
    Ok(EnsembleOutput {
        mean,
        stderr,
        jump_counts,
        max_top_pop: max_of(&series, |r| r.top_level_pop),
        max_trace_error: max_of(&series, |r| r.trace_error),
    })
}

pub fn stochastic(
    pool: &rayon::ThreadPool,
    psi0: &StateVector,
    params: &SimParams,
    cfg: &NoiseCfg,
) -> Result<EnsembleOutput> {
    cfg.validate_for(params)?;
    let series: Vec<ObservableSeries> = pool.install(|| {
        (0..cfg.n_runs as u64)
            .into_par_iter()
            .map(|i| evolve_stochastic(psi0, params, cfg, i))
            .collect::<rabi_core::Result<_>>()
    })?;
    let (mean, stderr) = reduce(&series)?;
    Ok(EnsembleOutput {
        mean,
        stderr,
        jump_counts: Vec::new(),
        max_top_pop: max_of(&series, |r| r.top_level_pop),
        max_trace_error: max_of(&series, |r| r.trace_error),
    })
}

/// One master-equation run and fit per sweep value, in parallel.
pub fn sweep(pool: &rayon::ThreadPool, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let outcomes = pool.install(|| {
        spec.values
            .par_iter()
            .map(|&v| sweep_point(spec, v))
            .collect::<Vec<_>>()
    });
    Ok(assemble_sweep(spec, outcomes))
}
