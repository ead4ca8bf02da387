//! Asymptotic photon generation rate and parameter sweeps.
//!
//! The rate `β = d⟨n⟩/dτ` is the least-squares slope of `⟨n⟩` against `τ`
//! over a tail window. By default the window starts after the transient,
//! at `max(15, τ_max/2)`, and runs to the end of the series.

use crate::error::{Error, Result};
use crate::integrator::IntegratorCfg;
use crate::master::{evolve, DensityMatrix, TimeGrid};
use crate::observables::ObservableSeries;
use crate::operators::Coupling;
use crate::params::SimParams;
use crate::space::HilbertSpace;
use crate::state::{prepare_state, StateSpec};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// End of the transient in dimensionless time.
pub const TRANSIENT_TAU: f64 = 15.0;
/// Fits below this `r²` are flagged as not yet asymptotic.
pub const ASYMPTOTIC_R2: f64 = 0.98;
pub const MIN_FIT_SAMPLES: usize = 10;

/// Slack when matching sample times against window edges.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Slope `d⟨n⟩/dτ`.
    pub beta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Ordinary least-squares standard error of the slope.
    pub beta_stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

impl RateFit {
    pub fn is_asymptotic(&self) -> bool {
        self.r_squared >= ASYMPTOTIC_R2
    }
}

/// `[max(15, τ_max/2), τ_max]`.
pub fn default_window(tau_max: f64) -> (f64, f64) {
    (TRANSIENT_TAU.max(0.5 * tau_max), tau_max)
}

/// Least-squares line through `(x, y)`: slope, intercept, `r²` and the
/// slope's standard error.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    let stderr = if x.len() > 2 {
        libm::sqrt(sse / (n - 2.0) / sxx)
    } else {
        0.0
    };
    (slope, intercept, r2, stderr)
}

/// Fits `⟨n⟩` against `τ` over `window`, or the default tail window.
pub fn fit_rate(series: &ObservableSeries, window: Option<(f64, f64)>) -> Result<RateFit> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(a), Some(b)) => (a.tau, b.tau),
        _ => return Err(Error::EmptyInput),
    };
    let (lo, hi) = window.unwrap_or_else(|| default_window(last));
    if lo.is_nan() || hi.is_nan() || lo >= hi || lo < first - EDGE_EPS || hi > last + EDGE_EPS {
        return Err(Error::WindowOutOfRange {
            lo,
            hi,
            first,
            last,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|r| r.tau >= lo - EDGE_EPS && r.tau <= hi + EDGE_EPS)
        .map(|r| (r.tau, r.n_mean))
        .unzip();
    if x.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            required: MIN_FIT_SAMPLES,
            found: x.len(),
        });
    }
    let (beta, intercept, r_squared, beta_stderr) = fit_line(&x, &y);
    Ok(RateFit {
        beta,
        intercept,
        r_squared,
        beta_stderr,
        window: (lo, hi),
        n_points: x.len(),
    })
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// `ω + ω0`, varied through `ω0` at fixed `ω`.
    Omega0Sum,
    G,
    GammaPh,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Omega0Sum => "omega0_sum",
            SweepAxis::G => "g",
            SweepAxis::GammaPh => "gamma_ph",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "omega0_sum" => Some(SweepAxis::Omega0Sum),
            "g" => Some(SweepAxis::G),
            "gamma_ph" => Some(SweepAxis::GammaPh),
            _ => None,
        }
    }

    /// `fixed` with this axis set to `value`.
    pub fn apply(self, fixed: &SimParams, value: f64) -> SimParams {
        let mut p = *fixed;
        match self {
            SweepAxis::Omega0Sum => p.omega0 = value - p.omega,
            SweepAxis::G => p.g = value,
            SweepAxis::GammaPh => p.gamma_ph = value,
        }
        p
    }
}

/// Everything needed to run one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub fixed: SimParams,
    pub grid: TimeGrid,
    pub integrator: IntegratorCfg,
    pub space: HilbertSpace,
    pub initial: StateSpec,
    pub coupling: Coupling,
    pub window: Option<(f64, f64)>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if self.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("sweep values must be positive"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        self.grid.validate()?;
        self.integrator.validate()
    }
}

/// One master-equation run and fit at `value`.
pub fn sweep_point(spec: &SweepSpec, value: f64) -> Result<RateFit> {
    let params = spec.axis.apply(&spec.fixed, value);
    let h = spec.coupling.hamiltonian(&params, spec.space);
    let rho0 = DensityMatrix::from_pure(&prepare_state(&spec.initial, spec.space)?);
    let (series, _) = evolve(&rho0, &h, &params, &spec.grid, &spec.integrator)?;
    fit_rate(&series, spec.window)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub betas: Vec<Option<f64>>,
    pub r_squared: Vec<Option<f64>>,
    /// `ok`, `not-asymptotic`, `truncation-exceeded` or `failed`.
    pub flags: Vec<&'static str>,
    /// Error message per point, empty when the point succeeded.
    pub messages: Vec<String>,
    pub fixed: SimParams,
}

/// Collects per-point outcomes, in value order, into a [`SweepResult`].
/// Failed points are annotated, not fatal.
pub fn assemble_sweep(spec: &SweepSpec, outcomes: Vec<Result<RateFit>>) -> SweepResult {
    let mut res = SweepResult {
        axis: spec.axis,
        values: spec.values.clone(),
        betas: Vec::new(),
        r_squared: Vec::new(),
        flags: Vec::new(),
        messages: Vec::new(),
        fixed: spec.fixed,
    };
    for outcome in outcomes {
        match outcome {
            Ok(fit) => {
                res.betas.push(Some(fit.beta));
                res.r_squared.push(Some(fit.r_squared));
                res.flags.push(if fit.is_asymptotic() {
                    "ok"
                } else {
                    "not-asymptotic"
                });
                res.messages.push(String::new());
            }
            Err(e) => {
                res.betas.push(None);
                res.r_squared.push(None);
                res.flags.push(match e {
                    Error::TruncationExceeded { .. } => "truncation-exceeded",
                    _ => "failed",
                });
                res.messages.push(format!("{e}"));
            }
        }
    }
    res
}

/// Runs every sweep point in order.
pub fn sweep_beta(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let outcomes = spec.values.iter().map(|&v| sweep_point(spec, v)).collect();
    Ok(assemble_sweep(spec, outcomes))
}

/// Rabi model against the unit-weight ladder variant, same everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianComparison {
    pub rabi: ObservableSeries,
    pub phase: ObservableSeries,
    pub rabi_fit: RateFit,
    pub phase_fit: RateFit,
}

pub fn compare_hamiltonians(
    params: &SimParams,
    grid: &TimeGrid,
    integrator: &IntegratorCfg,
    space: HilbertSpace,
    initial: &StateSpec,
) -> Result<HamiltonianComparison> {
    let rho0 = DensityMatrix::from_pure(&prepare_state(initial, space)?);
    let run = |c: Coupling| -> Result<(ObservableSeries, RateFit)> {
        let h = c.hamiltonian(params, space);
        let (series, _) = evolve(&rho0, &h, params, grid, integrator)?;
        let fit = fit_rate(&series, None)?;
        Ok((series, fit))
    };
    let (rabi, rabi_fit) = run(Coupling::Rabi)?;
    let (phase, phase_fit) = run(Coupling::PhaseOperator)?;
    Ok(HamiltonianComparison {
        rabi,
        phase,
        rabi_fit,
        phase_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::ObservableRecord;
    use proptest::prelude::*;

    fn line(slope: f64, offset: f64, taus: &[f64]) -> ObservableSeries {
        let mut s = ObservableSeries::new();
        for &tau in taus {
            let n = slope * tau + offset;
            s.push(ObservableRecord {
                t: tau * 10.0,
                tau,
                n_mean: n,
                n_sq_mean: n * n,
                sigma_z_mean: 0.0,
                mandel_q: None,
                p_e: 0.0,
                quanta_mean: n,
                energy_mean: 0.0,
                trace_error: 0.0,
                top_level_pop: 0.0,
            });
        }
        s
    }

    fn taus(n: usize, end: f64) -> Vec<f64> {
        (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exact_line() {
        let s = line(0.5, 3.0, &taus(101, 50.0));
        let fit = fit_rate(&s, None).unwrap();
        assert!((fit.beta - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.window, (25.0, 50.0));
        assert_eq!(fit.n_points, 51);
    }

    #[test]
    fn default_window_respects_transient() {
        assert_eq!(default_window(20.0), (15.0, 20.0));
        assert_eq!(default_window(80.0), (40.0, 80.0));
    }

    #[test]
    fn window_errors() {
        let s = line(1.0, 0.0, &taus(21, 50.0));
        assert!(matches!(
            fit_rate(&s, Some((40.0, 60.0))),
            Err(Error::WindowOutOfRange { .. })
        ));
        assert!(matches!(
            fit_rate(&s, Some((45.0, 50.0))),
            Err(Error::TooFewSamples { found: 3, .. })
        ));
        let short = line(1.0, 0.0, &taus(21, 10.0));
        assert!(fit_rate(&short, None).is_err());
        assert!(matches!(
            fit_rate(&ObservableSeries::new(), None),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn axis_application() {
        let p = SimParams::resonant(0.1);
        assert!((SweepAxis::Omega0Sum.apply(&p, 2.4).omega0 - 1.4).abs() < 1e-15);
        assert_eq!(SweepAxis::G.apply(&p, 0.05).g, 0.05);
        assert_eq!(SweepAxis::GammaPh.apply(&p, 0.2).gamma_ph, 0.2);
        for a in [SweepAxis::Omega0Sum, SweepAxis::G, SweepAxis::GammaPh] {
            assert_eq!(SweepAxis::from_name(a.name()), Some(a));
        }
    }

    #[test]
    fn failed_points_are_annotated() {
        let spec = SweepSpec {
            axis: SweepAxis::G,
            values: alloc::vec![0.1, 0.2],
            fixed: SimParams::resonant(0.1),
            grid: TimeGrid::new(10.0, 11, 0.1).unwrap(),
            integrator: IntegratorCfg::default(),
            space: crate::space::build_space(2).unwrap(),
            initial: StateSpec::ground(),
            coupling: Coupling::Rabi,
            window: None,
        };
        let res = assemble_sweep(
            &spec,
            alloc::vec![
                Err(Error::TruncationExceeded {
                    sample: 3,
                    t: 3.0,
                    tau: 0.3,
                    population: 1e-3,
                    tolerance: 1e-6,
                    last_good_tau: Some(0.2)
                }),
                Err(Error::EmptyInput),
            ],
        );
        assert_eq!(res.flags, ["truncation-exceeded", "failed"]);
        assert_eq!(res.betas, [None, None]);
        assert!(res.messages[0].contains("sample 3"));
    }

    proptest! {
        #[test]
        fn translation_covariance(
            slope in -2.0f64..2.0,
            offset in -5.0f64..5.0,
            shift in -100.0f64..100.0,
            wiggle in 0.0f64..0.5,
        ) {
            let ts = taus(61, 60.0);
            let mut s = line(slope, offset, &ts);
            for (k, r) in s.records.iter_mut().enumerate() {
                r.n_mean += wiggle * ((k * 7 % 5) as f64 - 2.0);
            }
            let mut shifted = s.clone();
            shifted.records.iter_mut().for_each(|r| r.n_mean += shift);
            let a = fit_rate(&s, None).unwrap();
            let b = fit_rate(&shifted, None).unwrap();
            prop_assert!((a.beta - b.beta).abs() <= 1e-12 * (1.0 + shift.abs()));
            prop_assert!((b.intercept - a.intercept - shift).abs() <= 1e-10 * (1.0 + shift.abs()));
        }
    }
}
