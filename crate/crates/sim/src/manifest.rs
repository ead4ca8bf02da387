//! JSON record written next to every run's CSV files.

use crate::config::{Plan, RunConfig};
use crate::error::ConfigError;
use rabi_core::SimParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub gamma_ph: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub n_t: f64,
}

impl From<&SimParams> for ParamsRecord {
    fn from(p: &SimParams) -> Self {
        Self {
            omega: p.omega,
            omega0: p.omega0,
            g: p.g,
            gamma_ph: p.gamma_ph,
            gamma: p.gamma,
            kappa: p.kappa,
            n_t: p.n_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    pub params: ParamsRecord,
    pub initial: String,
    pub coupling: String,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRecord {
    pub solver: String,
    pub n_max: usize,
    pub t_end: f64,
    pub n_samples: usize,
    pub xi: f64,
    pub atol: f64,
    pub rtol: f64,
    pub trunc_tol: f64,
    pub master_seed: u64,
    pub ensemble_size: usize,
    pub singles: usize,
    pub propagation: String,
    pub epsilon: f64,
    pub dt: f64,
    pub outer_branch_abs_r: bool,
    pub curves: Vec<CurveRecord>,
    pub sweep_axis: Option<String>,
    pub sweep_values: Option<Vec<f64>>,
}

fn json_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

impl From<&Plan> for ResolvedRecord {
    fn from(p: &Plan) -> Self {
        Self {
            solver: json_name(&p.solver),
            n_max: p.n_max,
            t_end: p.t_end,
            n_samples: p.n_samples,
            xi: p.xi,
            atol: p.integrator.atol,
            rtol: p.integrator.rtol,
            trunc_tol: p.integrator.trunc_tol,
            master_seed: p.master_seed,
            ensemble_size: p.ensemble_size,
            singles: p.singles,
            propagation: json_name(&p.propagation),
            epsilon: p.epsilon,
            dt: p.dt,
            outer_branch_abs_r: p.outer_branch_abs_r,
            curves: p
                .curves
                .iter()
                .map(|c| CurveRecord {
                    label: c.label.clone(),
                    params: (&c.params).into(),
                    initial: c.initial.clone(),
                    coupling: json_name(&c.coupling),
                    x: c.x,
                })
                .collect(),
            sweep_axis: p.sweep.as_ref().map(|s| s.axis.name().to_string()),
            sweep_values: p.sweep.as_ref().map(|s| s.values.clone()),
        }
    }
}

/// Largest top-two-level population seen for one curve or sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub curve: String,
    pub n_max: usize,
    pub tolerance: f64,
    pub max_top_pop: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub base_preset: String,
    /// The configuration as given, which with the preset determines the run.
    pub config: RunConfig,
    pub resolved: ResolvedRecord,
    pub truncation: Vec<TruncationRecord>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(config: &RunConfig, plan: &Plan) -> Self {
        Self {
            tool: "rabi".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            base_preset: config.scenario.name().into(),
            config: config.clone(),
            resolved: plan.into(),
            truncation: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest always serializes")
    }
}

/// Reads a run configuration from TOML text or from a manifest's JSON.
pub fn config_from_text(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim_start().starts_with('{') {
        let m: Manifest = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        m.config.resolve()?;
        Ok(m.config)
    } else {
        crate::config::parse_config(text)
    }
}
