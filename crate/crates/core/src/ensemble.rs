//! Pointwise ensemble statistics over equally sampled runs.
//!
//! The reduction walks runs in index order with pairwise summation, so the
//! result depends only on the list of runs and never on how they were
//! scheduled.

use crate::error::{Error, Result};
use crate::observables::{mandel_q, ObservableRecord, ObservableSeries};
use alloc::vec::Vec;

/// Pairwise (cascade) sum.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Sample mean and standard error of the mean; the error is 0 for one value.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Pointwise mean and standard error of the runs.
///
/// The Mandel factor of the mean is rebuilt from the averaged `⟨n⟩` and
/// `⟨n²⟩`, i.e. it is the Mandel factor of the mixture. The stderr series
/// carries no Mandel factor.
pub fn reduce(runs: &[ObservableSeries]) -> Result<(ObservableSeries, ObservableSeries)> {
    let first = runs.first().ok_or(Error::EmptyInput)?;
    let len = first.len();
    if let Some(bad) = runs.iter().find(|r| r.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let mut mean = ObservableSeries::with_capacity(len);
    let mut err = ObservableSeries::with_capacity(len);
    let mut column = Vec::with_capacity(runs.len());
    for k in 0..len {
        let base = first.records[k];
        let mut stat = |f: fn(&ObservableRecord) -> f64| {
            column.clear();
            column.extend(runs.iter().map(|r| f(&r.records[k])));
            mean_stderr(&column)
        };
        let n = stat(|r| r.n_mean);
        let n2 = stat(|r| r.n_sq_mean);
        let sz = stat(|r| r.sigma_z_mean);
        let pe = stat(|r| r.p_e);
        let nq = stat(|r| r.quanta_mean);
        let en = stat(|r| r.energy_mean);
        let tr = stat(|r| r.trace_error);
        let top = stat(|r| r.top_level_pop);
        mean.push(ObservableRecord {
            t: base.t,
            tau: base.tau,
            n_mean: n.0,
            n_sq_mean: n2.0,
            sigma_z_mean: sz.0,
            mandel_q: mandel_q(n.0, n2.0),
            p_e: pe.0,
            quanta_mean: nq.0,
            energy_mean: en.0,
            trace_error: tr.0,
            top_level_pop: top.0,
        });
        err.push(ObservableRecord {
            t: base.t,
            tau: base.tau,
            n_mean: n.1,
            n_sq_mean: n2.1,
            sigma_z_mean: sz.1,
            mandel_q: None,
            p_e: pe.1,
            quanta_mean: nq.1,
            energy_mean: en.1,
            trace_error: tr.1,
            top_level_pop: top.1,
        });
    }
    Ok((mean, err))
}
