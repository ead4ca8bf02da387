//! Executes a resolved run and writes its files.

use crate::config::{parse_initial, Curve, Plan, RunConfig, Solver};
use crate::error::{Result, SimError};
use crate::manifest::{Manifest, TruncationRecord};
use crate::output::{write_series, write_spectrum, write_sweep, Extra};
use crate::parallel;
use crate::spectrum::ensemble_spectrum;
use rabi_core::analysis::{fit_rate, SweepSpec};
use rabi_core::noise::evolve_stochastic;
use rabi_core::space::build_space;
use rabi_core::state::prepare_state;
use rabi_core::trajectory::{run_trajectory, TrajectoryCfg};
use rabi_core::{evolve, DensityMatrix, ObservableSeries, StateVector};
use rayon::prelude::*;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub struct RunReport {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
    /// One human-readable line per curve or sweep point.
    pub summary: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    manifest: &'a mut Manifest,
    summary: Vec<String>,
}

impl Writer<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| SimError::io(&path, e))?;
        self.manifest.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn series(&mut self, name: &str, s: &ObservableSeries, extra: Extra<'_>) -> Result<()> {
        write_series(self.create(name)?, s, extra)
    }
}

fn describe(label: &str, s: &ObservableSeries) -> String {
    let last = s.last().expect("series has samples");
    let fit = match fit_rate(s, None) {
        Ok(f) => format!("beta {:.6e} (r2 {:.4})", f.beta, f.r_squared),
        Err(_) => "beta n/a".to_string(),
    };
    format!(
        "{label}: n_mean(tau={}) = {:.6e}, {fit}",
        last.tau, last.n_mean
    )
}

fn max_top(s: &ObservableSeries) -> f64 {
    s.iter().map(|r| r.top_level_pop).fold(0.0, f64::max)
}

fn initial_state(plan: &Plan, curve: &Curve) -> Result<StateVector> {
    let space = build_space(plan.n_max)?;
    let spec = parse_initial(&curve.initial).expect("validated initial state");
    Ok(prepare_state(&spec, space)?)
}

fn truncation_ok(plan: &Plan, label: &str, top: f64) -> TruncationRecord {
    TruncationRecord {
        curve: label.to_string(),
        n_max: plan.n_max,
        tolerance: plan.integrator.trunc_tol,
        max_top_pop: Some(top),
        status: "ok".into(),
    }
}

/// Runs `config`, writing CSV files, `manifest.json` and `run.toml` into
/// `out_dir`.
pub fn run_scenario(
    config: &RunConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunReport> {
    let plan = config.resolve()?;
    fs::create_dir_all(out_dir).map_err(|e| SimError::io(out_dir, e))?;
    let pool = parallel::pool(threads)?;
    let mut manifest = Manifest::new(config, &plan);
    log::info!(
        "scenario {} ({} curve(s), solver {:?}, n_max {})",
        plan.scenario,
        plan.curves.len(),
        plan.solver,
        plan.n_max
    );
    if *config != RunConfig::preset(config.scenario) {
        let text = config.to_toml();
        let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
        log::info!("overrides: {}", lines.join("; "));
    }
    let mut w = Writer {
        dir: out_dir,
        manifest: &mut manifest,
        summary: Vec::new(),
    };
    match (&plan.sweep, plan.solver) {
        (Some(_), _) => run_sweep(&plan, &pool, &mut w)?,
        (None, Solver::Master) => run_master(&plan, &pool, &mut w)?,
        (None, Solver::Trajectory) => run_trajectories(&plan, &pool, &mut w)?,
        (None, Solver::Stochastic) => run_stochastic(&plan, &pool, &mut w)?,
    }
    let summary = std::mem::take(&mut w.summary);

    let toml_path = out_dir.join("run.toml");
    fs::write(&toml_path, config.to_toml()).map_err(|e| SimError::io(&toml_path, e))?;
    manifest.files.push("run.toml".into());
    manifest.files.push("manifest.json".into());
    let path = out_dir.join("manifest.json");
    fs::write(&path, manifest.to_json()).map_err(|e| SimError::io(&path, e))?;
    Ok(RunReport {
        manifest,
        out_dir: out_dir.to_path_buf(),
        summary,
    })
}

fn run_master(plan: &Plan, pool: &rayon::ThreadPool, w: &mut Writer<'_>) -> Result<()> {
    let grid = plan.grid();
    let space = build_space(plan.n_max)?;
    let results: Vec<Result<ObservableSeries>> = pool.install(|| {
        plan.curves
            .par_iter()
            .map(|c| {
                let psi = initial_state(plan, c)?;
                let h = c.coupling.coupling().hamiltonian(&c.params, space);
                let rho0 = DensityMatrix::from_pure(&psi);
                let (series, _) = evolve(&rho0, &h, &c.params, &grid, &plan.integrator)?;
                Ok(series)
            })
            .collect()
    });
    for (c, res) in plan.curves.iter().zip(results) {
        let series = res?;
        let extra = if plan.gt_column {
            Extra::CouplingTime(c.params.g)
        } else {
            Extra::None
        };
        w.series(&format!("{}.csv", c.label), &series, extra)?;
        w.summary.push(describe(&c.label, &series));
        w.manifest
            .truncation
            .push(truncation_ok(plan, &c.label, max_top(&series)));
    }
    Ok(())
}

fn run_trajectories(plan: &Plan, pool: &rayon::ThreadPool, w: &mut Writer<'_>) -> Result<()> {
    let space = build_space(plan.n_max)?;
    for c in &plan.curves {
        let psi = initial_state(plan, c)?;
        let h = c.coupling.coupling().hamiltonian(&c.params, space);
        let cfg = TrajectoryCfg {
            master_seed: plan.master_seed,
            n_traj: plan.ensemble_size,
            grid: plan.grid(),
            integrator: plan.integrator,
            propagation: plan.propagation(),
        };
        let ens = parallel::trajectories(pool, &psi, &h, c.params.gamma_ph, &cfg)?;
        w.series(&format!("{}_mean.csv", c.label), &ens.mean, Extra::None)?;
        w.series(&format!("{}_stderr.csv", c.label), &ens.stderr, Extra::None)?;
        w.summary.push(describe(&c.label, &ens.mean));
        for i in 0..plan.singles.min(plan.ensemble_size) {
            let tr = run_trajectory(&psi, &h, c.params.gamma_ph, &cfg, i as u64)?;
            w.series(
                &format!("{}_single_{i}.csv", c.label),
                &tr.series,
                Extra::Jumps(&tr.jump_times),
            )?;
        }
        w.manifest
            .truncation
            .push(truncation_ok(plan, &c.label, ens.max_top_pop));
    }
    Ok(())
}

fn run_stochastic(plan: &Plan, pool: &rayon::ThreadPool, w: &mut Writer<'_>) -> Result<()> {
    for c in &plan.curves {
        let psi = initial_state(plan, c)?;
        let cfg = plan.noise_cfg(c);
        let ens = parallel::stochastic(pool, &psi, &c.params, &cfg)?;
        w.series(&format!("{}_mean.csv", c.label), &ens.mean, Extra::None)?;
        w.series(&format!("{}_stderr.csv", c.label), &ens.stderr, Extra::None)?;
        w.summary.push(describe(&c.label, &ens.mean));
        let spectrum = ensemble_spectrum(pool, &cfg)?;
        write_spectrum(w.create(&format!("{}_spectrum.csv", c.label))?, &spectrum)?;
        for i in 0..plan.singles.min(plan.ensemble_size) {
            let s = evolve_stochastic(&psi, &c.params, &cfg, i as u64)?;
            w.series(&format!("{}_single_{i}.csv", c.label), &s, Extra::None)?;
        }
        w.manifest
            .truncation
            .push(truncation_ok(plan, &c.label, ens.max_top_pop));
    }
    Ok(())
}

fn run_sweep(plan: &Plan, pool: &rayon::ThreadPool, w: &mut Writer<'_>) -> Result<()> {
    let sw = plan.sweep.as_ref().expect("sweep plan");
    let c = &plan.curves[0];
    let spec = SweepSpec {
        axis: sw.axis,
        values: sw.values.clone(),
        fixed: c.params,
        grid: plan.grid(),
        integrator: plan.integrator,
        space: build_space(plan.n_max)?,
        initial: parse_initial(&c.initial).expect("validated initial state"),
        coupling: c.coupling.coupling(),
        window: None,
    };
    let res = parallel::sweep(pool, &spec)?;
    write_sweep(w.create("sweep.csv")?, &res)?;
    for i in 0..res.values.len() {
        if !res.messages[i].is_empty() {
            log::warn!(
                "{} = {}: {}",
                sw.axis.name(),
                res.values[i],
                res.messages[i]
            );
        }
        w.summary.push(match res.betas[i] {
            Some(b) => format!(
                "{} = {}: beta {b:.6e} [{}]",
                sw.axis.name(),
                res.values[i],
                res.flags[i]
            ),
            None => format!("{} = {}: [{}]", sw.axis.name(), res.values[i], res.flags[i]),
        });
        w.manifest.truncation.push(TruncationRecord {
            curve: format!("{}={}", sw.axis.name(), res.values[i]),
            n_max: plan.n_max,
            tolerance: plan.integrator.trunc_tol,
            max_top_pop: None,
            status: res.flags[i].to_string(),
        });
    }
    Ok(())
}
