//! Run configuration: a scenario preset plus optional overrides, read from
//! TOML.
//!
//! ```toml
//! scenario = "fig1a"
//! n_max = 40
//!
//! [params]
//! g = 0.05
//! ```

use crate::error::ConfigError;
use crate::presets;
use rabi_core::analysis::SweepAxis;
use rabi_core::integrator::IntegratorCfg;
use rabi_core::noise::{NoiseCfg, MAX_G_DT};
use rabi_core::operators::Coupling;
use rabi_core::state::{AtomState, FieldState};
use rabi_core::trajectory::Propagation;
use rabi_core::{SimParams, StateSpec, TimeGrid};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "fig1a")]
    Fig1a,
    #[serde(rename = "fig1b")]
    Fig1b,
    #[serde(rename = "fig1c")]
    Fig1c,
    #[serde(rename = "fig2-traj")]
    Fig2Traj,
    #[serde(rename = "fig2d-jc")]
    Fig2dJc,
    #[serde(rename = "fig2e-phase")]
    Fig2ePhase,
    #[serde(rename = "fig3a")]
    Fig3a,
    #[serde(rename = "fig3b")]
    Fig3b,
    #[serde(rename = "fig3c")]
    Fig3c,
    #[serde(rename = "fig4")]
    Fig4,
    #[serde(rename = "fig5a")]
    Fig5a,
    #[serde(rename = "fig5b")]
    Fig5b,
    #[serde(rename = "fig5c")]
    Fig5c,
    #[default]
    #[serde(rename = "custom")]
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 14] = [
        Scenario::Fig1a,
        Scenario::Fig1b,
        Scenario::Fig1c,
        Scenario::Fig2Traj,
        Scenario::Fig2dJc,
        Scenario::Fig2ePhase,
        Scenario::Fig3a,
        Scenario::Fig3b,
        Scenario::Fig3c,
        Scenario::Fig4,
        Scenario::Fig5a,
        Scenario::Fig5b,
        Scenario::Fig5c,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1a => "fig1a",
            Scenario::Fig1b => "fig1b",
            Scenario::Fig1c => "fig1c",
            Scenario::Fig2Traj => "fig2-traj",
            Scenario::Fig2dJc => "fig2d-jc",
            Scenario::Fig2ePhase => "fig2e-phase",
            Scenario::Fig3a => "fig3a",
            Scenario::Fig3b => "fig3b",
            Scenario::Fig3c => "fig3c",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5a => "fig5a",
            Scenario::Fig5b => "fig5b",
            Scenario::Fig5c => "fig5c",
            Scenario::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Master,
    Trajectory,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Rabi,
    Jc,
    Phase,
}

impl CouplingKind {
    pub fn coupling(self) -> Coupling {
        match self {
            CouplingKind::Rabi => Coupling::Rabi,
            CouplingKind::Jc => Coupling::JaynesCummings,
            CouplingKind::Phase => Coupling::PhaseOperator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationKind {
    Adaptive,
    Spectral,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Values replacing the preset's, applied to every curve.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Detuning `ω0 − ω`; exclusive with `omega0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_ph: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_t: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    /// End time in units of `1/ω`; exclusive with `tau_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Trajectories or stochastic runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// Individual runs written alongside the ensemble average.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation: Option<PropagationKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_branch_abs_r: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// A preset reference plus everything that departs from it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingKind>,
    /// `g<n>`, `e<n>` or `phi1` … `phi6`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub params: ParamOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub grid: GridOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub integrator: IntegratorOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub ensemble: EnsembleOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub noise: NoiseOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sweep: SweepOverrides,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    cfg.resolve()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn preset(scenario: Scenario) -> Self {
        Self {
            scenario,
            ..Self::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    /// Preset with overrides applied, validated.
    pub fn resolve(&self) -> Result<Plan, ConfigError> {
        let mut plan = presets::base_plan(self.scenario);
        self.apply(&mut plan)?;
        plan.validate()?;
        Ok(plan)
    }

    fn apply(&self, plan: &mut Plan) -> Result<(), ConfigError> {
        if let Some(s) = self.solver {
            plan.solver = s;
        }
        if let Some(n) = self.n_max {
            plan.n_max = n;
        }
        let p = &self.params;
        if p.omega0.is_some() && p.detuning.is_some() {
            return Err(ConfigError::invalid(
                "params.detuning",
                "give either omega0 or detuning, not both",
            ));
        }
        for curve in &mut plan.curves {
            if let Some(c) = self.coupling {
                curve.coupling = c;
            }
            if let Some(name) = &self.initial {
                curve.initial = name.clone();
            }
            let q = &mut curve.params;
            if let Some(v) = p.omega {
                q.omega = v;
            }
            if let Some(v) = p.omega0 {
                q.omega0 = v;
            }
            if let Some(v) = p.detuning {
                q.omega0 = q.omega + v;
            }
            if let Some(v) = p.g {
                q.g = v;
            }
            if let Some(v) = p.gamma_ph {
                q.gamma_ph = v;
            }
            if let Some(v) = p.gamma {
                q.gamma = v;
            }
            if let Some(v) = p.kappa {
                q.kappa = v;
            }
            if let Some(v) = p.n_t {
                q.n_t = v;
            }
            if let Some(v) = self.noise.x {
                curve.x = v;
            }
        }

        let g = &self.grid;
        if g.t_end.is_some() && g.tau_end.is_some() {
            return Err(ConfigError::invalid(
                "grid.tau_end",
                "give either t_end or tau_end, not both",
            ));
        }
        if let Some(xi) = g.xi {
            plan.xi = xi;
        }
        if let Some(t) = g.t_end {
            plan.t_end = t;
        }
        if let Some(tau) = g.tau_end {
            plan.t_end = tau / plan.xi;
        }
        if let Some(n) = g.n_samples {
            plan.n_samples = n;
        }

        let i = &self.integrator;
        if let Some(v) = i.atol {
            plan.integrator.atol = v;
        }
        if let Some(v) = i.rtol {
            plan.integrator.rtol = v;
        }
        if let Some(v) = i.trunc_tol {
            plan.integrator.trunc_tol = v;
        }

        let e = &self.ensemble;
        if let Some(v) = e.master_seed {
            plan.master_seed = v;
        }
        if let Some(v) = e.size {
            plan.ensemble_size = v;
        }
        if let Some(v) = e.singles {
            plan.singles = v;
        }
        if let Some(v) = e.propagation {
            plan.propagation = v;
        }

        let n = &self.noise;
        if let Some(v) = n.epsilon {
            plan.epsilon = v;
        }
        if let Some(v) = n.dt {
            plan.dt = v;
        }
        if let Some(v) = n.outer_branch_abs_r {
            plan.outer_branch_abs_r = v;
        }

        let s = &self.sweep;
        if s.axis.is_some() || s.values.is_some() {
            let axis = match &s.axis {
                Some(name) => SweepAxis::from_name(name).ok_or_else(|| {
                    ConfigError::invalid(
                        "sweep.axis",
                        format!("unknown axis {name:?}; expected omega0_sum, g or gamma_ph"),
                    )
                })?,
                None => plan.sweep.as_ref().map(|sw| sw.axis).ok_or_else(|| {
                    ConfigError::invalid("sweep.axis", "required when sweep values are given")
                })?,
            };
            let values = match &s.values {
                Some(v) => v.clone(),
                None => plan
                    .sweep
                    .as_ref()
                    .map(|sw| sw.values.clone())
                    .ok_or_else(|| {
                        ConfigError::invalid("sweep.values", "required when a sweep axis is given")
                    })?,
            };
            plan.sweep = Some(SweepPlan { axis, values });
        }
        Ok(())
    }
}

/// One curve of a scenario: a full parameter set and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// File stem for this curve's output.
    pub label: String,
    pub params: SimParams,
    pub initial: String,
    pub coupling: CouplingKind,
    /// Noise-frequency knob, used by the stochastic solver.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Fully resolved description of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub scenario: Scenario,
    pub solver: Solver,
    pub n_max: usize,
    pub t_end: f64,
    pub n_samples: usize,
    pub xi: f64,
    pub integrator: IntegratorCfg,
    pub master_seed: u64,
    pub ensemble_size: usize,
    pub singles: usize,
    pub propagation: PropagationKind,
    pub epsilon: f64,
    pub dt: f64,
    pub outer_branch_abs_r: bool,
    pub curves: Vec<Curve>,
    pub sweep: Option<SweepPlan>,
    /// Add a `gt` column to series output.
    pub gt_column: bool,
}

/// Parses `g<n>`, `e<n>` and `phi<k>`.
pub fn parse_initial(name: &str) -> Option<StateSpec> {
    if let Some(k) = name.strip_prefix("phi") {
        return StateSpec::phi(k.parse().ok()?);
    }
    let atom = match name.chars().next()? {
        'g' => AtomState::Ground,
        'e' => AtomState::Excited,
        _ => return None,
    };
    let n: usize = name[1..].parse().ok()?;
    Some(StateSpec::new(atom, FieldState::Fock(n)))
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be positive, got {v}"),
        ))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be non-negative, got {v}"),
        ))
    }
}

impl Plan {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t_end: self.t_end,
            n_samples: self.n_samples,
            xi: self.xi,
        }
    }

    pub fn propagation(&self) -> Propagation {
        match self.propagation {
            PropagationKind::Adaptive => Propagation::Adaptive,
            PropagationKind::Spectral => Propagation::Spectral,
        }
    }

    /// Steps of the noise walk between samples.
    pub fn sample_every(&self) -> usize {
        let steps = (self.t_end / self.dt).round() as usize;
        steps / (self.n_samples - 1).max(1)
    }

    /// Noise configuration for `curve`.
    pub fn noise_cfg(&self, curve: &Curve) -> NoiseCfg {
        NoiseCfg {
            omega0_mean: curve.params.omega0,
            epsilon: self.epsilon,
            x: curve.x,
            dt: self.dt,
            t_end: self.t_end,
            n_runs: self.ensemble_size,
            master_seed: self.master_seed,
            outer_branch_abs_r: self.outer_branch_abs_r,
            sample_every: self.sample_every(),
            xi: self.xi,
            trunc_tol: self.integrator.trunc_tol,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_max < 1 {
            return Err(ConfigError::invalid("n_max", "must be at least 1"));
        }
        positive("grid.t_end", self.t_end)?;
        positive("grid.xi", self.xi)?;
        if self.n_samples < 2 {
            return Err(ConfigError::invalid(
                "grid.n_samples",
                format!("must be at least 2, got {}", self.n_samples),
            ));
        }
        positive("integrator.atol", self.integrator.atol)?;
        positive("integrator.rtol", self.integrator.rtol)?;
        positive("integrator.trunc_tol", self.integrator.trunc_tol)?;
        if self.curves.is_empty() {
            return Err(ConfigError::invalid("scenario", "preset has no curves"));
        }
        for c in &self.curves {
            let p = &c.params;
            positive("params.omega", p.omega)?;
            if !p.omega0.is_finite() {
                return Err(ConfigError::invalid("params.omega0", "must be finite"));
            }
            non_negative("params.g", p.g)?;
            non_negative("params.gamma_ph", p.gamma_ph)?;
            non_negative("params.gamma", p.gamma)?;
            non_negative("params.kappa", p.kappa)?;
            non_negative("params.n_t", p.n_t)?;
            if parse_initial(&c.initial).is_none() {
                return Err(ConfigError::invalid(
                    "initial",
                    format!(
                        "unknown state {:?}; expected g<n>, e<n> or phi1..phi6",
                        c.initial
                    ),
                ));
            }
            match self.solver {
                Solver::Trajectory if p.gamma != 0.0 || p.kappa != 0.0 => {
                    return Err(ConfigError::invalid(
                        "solver",
                        "trajectories unravel dephasing only; gamma and kappa must be 0",
                    ));
                }
                Solver::Stochastic => {
                    non_negative("noise.x", c.x)?;
                    if p.g * self.dt > MAX_G_DT {
                        return Err(ConfigError::invalid(
                            "noise.dt",
                            format!("g*dt = {} exceeds {MAX_G_DT}", p.g * self.dt),
                        ));
                    }
                }
                _ => {}
            }
        }
        if matches!(self.solver, Solver::Trajectory | Solver::Stochastic) && self.ensemble_size < 1
        {
            return Err(ConfigError::invalid("ensemble.size", "must be at least 1"));
        }
        if self.solver == Solver::Stochastic {
            positive("noise.epsilon", self.epsilon)?;
            positive("noise.dt", self.dt)?;
            let steps = (self.t_end / self.dt).round() as usize;
            if steps == 0 || !steps.is_multiple_of(self.n_samples - 1) {
                return Err(ConfigError::invalid(
                    "grid.n_samples",
                    format!("n_samples - 1 must divide the {steps} noise steps of the run"),
                ));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(ConfigError::invalid("sweep.values", "must not be empty"));
            }
            if sw.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(ConfigError::invalid("sweep.values", "must be positive"));
            }
            if sw.values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::invalid(
                    "sweep.values",
                    "must be strictly increasing",
                ));
            }
            if self.solver != Solver::Master {
                return Err(ConfigError::invalid(
                    "solver",
                    "sweeps use the master solver",
                ));
            }
        }
        Ok(())
    }
}
