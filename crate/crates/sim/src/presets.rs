//! Parameter sets of the named scenario presets.

use crate::config::{CouplingKind, Curve, Plan, PropagationKind, Scenario, Solver, SweepPlan};
use rabi_core::analysis::SweepAxis;
use rabi_core::integrator::IntegratorCfg;
use rabi_core::SimParams;

/// Coupling of the fig1 and fig2 presets.
pub const G_FIG1: f64 = 0.1;
/// Field frequency; every preset works in units of `ω`.
pub const OMEGA: f64 = 1.0;
pub const XI: f64 = 0.1;
pub const TAU_END: f64 = 50.0;

pub const G_FIG4: f64 = 6e-2;
pub const EPSILON_FIG4: f64 = G_FIG4;
pub const X_FIG4: [f64; 3] = [1.0, 3.0, 6.0];

/// `(γ_ph, γ, κ)` in units of `10⁻¹`, dotted line first, then lines 1–5.
pub const RATES_FIG5A: [(f64, f64, f64); 6] = [
    (0.0, 0.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 1.0, 0.0),
    (1.0, 1.0, 1.0),
    (1.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
];

pub const G_FIG5B: f64 = 2e-2;
pub const N_T_FIG5B: f64 = 6e-2;
pub const GT_END_FIG5B: f64 = 100.0;
/// `(γ_ph, γ, κ)` for current, future and biased-noise circuit QED.
pub const RATES_FIG5B: [(&str, (f64, f64, f64)); 3] = [
    ("current", (2e-4, 3e-4, 0.4e-4)),
    ("future", (2e-5, 3e-5, 0.4e-5)),
    ("biased", (200e-4, 3e-4, 0.4e-4)),
];

pub const OMEGA0_FIG3A: [f64; 5] = [0.6, 0.8, 1.0, 1.2, 1.4];
pub const G_FIG3B: [f64; 6] = [0.02, 0.025, 0.04, 0.05, 0.08, 0.1];
pub const GAMMA_PH_FIG3C: [f64; 4] = [0.025, 0.05, 0.1, 0.2];

fn resonant(g: f64, rates: (f64, f64, f64)) -> SimParams {
    SimParams {
        omega: OMEGA,
        omega0: OMEGA,
        g,
        ..SimParams::default()
    }
    .with_rates(rates.0, rates.1, rates.2)
}

fn curve(label: impl Into<String>, params: SimParams, initial: &str) -> Curve {
    Curve {
        label: label.into(),
        params,
        initial: initial.to_string(),
        coupling: CouplingKind::Rabi,
        x: 6.0,
    }
}

fn master(scenario: Scenario, curves: Vec<Curve>) -> Plan {
    Plan {
        scenario,
        solver: Solver::Master,
        n_max: 30,
        t_end: TAU_END / XI,
        n_samples: 501,
        xi: XI,
        integrator: IntegratorCfg::default(),
        master_seed: 1,
        ensemble_size: 2000,
        singles: 0,
        propagation: PropagationKind::Spectral,
        epsilon: EPSILON_FIG4,
        dt: 0.05,
        outer_branch_abs_r: false,
        curves,
        sweep: None,
        gt_column: false,
    }
}

fn sweep(scenario: Scenario, axis: SweepAxis, values: &[f64]) -> Plan {
    let fixed = resonant(G_FIG1, (0.1, 0.0, 0.0));
    let mut plan = master(scenario, vec![curve("sweep", fixed, "g0")]);
    plan.sweep = Some(SweepPlan {
        axis,
        values: values.to_vec(),
    });
    plan
}

fn trajectories(scenario: Scenario, coupling: CouplingKind) -> Plan {
    let mut c = curve("ensemble", resonant(G_FIG1, (0.1, 0.0, 0.0)), "g5");
    c.coupling = coupling;
    let mut plan = master(scenario, vec![c]);
    plan.solver = Solver::Trajectory;
    plan.n_max = 50;
    plan.n_samples = 51;
    plan.singles = 3;
    plan
}

fn circuit_qed(scenario: Scenario) -> Plan {
    let curves = RATES_FIG5B
        .iter()
        .map(|&(label, rates)| {
            let mut p = resonant(G_FIG5B, rates);
            p.n_t = N_T_FIG5B;
            curve(label, p, "g0")
        })
        .collect();
    let mut plan = master(scenario, curves);
    plan.n_max = 15;
    plan.t_end = GT_END_FIG5B / G_FIG5B;
    plan.n_samples = 1001;
    plan.gt_column = true;
    plan
}

/// Preset before any override.
pub fn base_plan(scenario: Scenario) -> Plan {
    match scenario {
        Scenario::Fig1a => master(
            scenario,
            vec![
                curve("gamma_ph_0", resonant(G_FIG1, (0.0, 0.0, 0.0)), "g0"),
                curve("gamma_ph_0.1", resonant(G_FIG1, (0.1, 0.0, 0.0)), "g0"),
            ],
        ),
        Scenario::Fig1b | Scenario::Fig1c => master(
            scenario,
            (1..=6)
                .map(|k| {
                    let name = format!("phi{k}");
                    curve(name.clone(), resonant(G_FIG1, (0.1, 0.0, 0.0)), &name)
                })
                .collect(),
        ),
        Scenario::Fig2Traj => trajectories(scenario, CouplingKind::Rabi),
        Scenario::Fig2dJc => trajectories(scenario, CouplingKind::Jc),
        Scenario::Fig2ePhase => {
            let p = resonant(G_FIG1, (0.1, 0.0, 0.0));
            let mut phase = curve("phase", p, "g0");
            phase.coupling = CouplingKind::Phase;
            master(scenario, vec![curve("rabi", p, "g0"), phase])
        }
        Scenario::Fig3a => {
            let sums: Vec<f64> = OMEGA0_FIG3A.iter().map(|w| OMEGA + w).collect();
            sweep(scenario, SweepAxis::Omega0Sum, &sums)
        }
        Scenario::Fig3b => sweep(scenario, SweepAxis::G, &G_FIG3B),
        Scenario::Fig3c => {
            let mut plan = sweep(scenario, SweepAxis::GammaPh, &GAMMA_PH_FIG3C);
            plan.n_max = 40;
            plan
        }
        Scenario::Fig4 => {
            let curves = X_FIG4
                .iter()
                .map(|&x| {
                    let mut c = curve(format!("x{x}"), resonant(G_FIG4, (0.0, 0.0, 0.0)), "g0");
                    c.x = x;
                    c
                })
                .collect();
            let mut plan = master(scenario, curves);
            plan.solver = Solver::Stochastic;
            plan.n_max = 12;
            plan.ensemble_size = 500;
            plan.singles = 3;
            plan
        }
        Scenario::Fig5a => master(
            scenario,
            RATES_FIG5A
                .iter()
                .map(|&(a, b, c)| {
                    let label = format!("rates_{a}_{b}_{c}");
                    curve(label, resonant(G_FIG1, (0.1 * a, 0.1 * b, 0.1 * c)), "g0")
                })
                .collect(),
        ),
        Scenario::Fig5b => circuit_qed(scenario),
        Scenario::Fig5c => {
            let mut plan = circuit_qed(scenario);
            let mut rwa = plan.curves[0].clone();
            rwa.label = "rwa_current".into();
            rwa.coupling = CouplingKind::Jc;
            plan.curves.push(rwa);
            plan
        }
        Scenario::Custom => master(
            scenario,
            vec![curve("custom", resonant(G_FIG1, (0.0, 0.0, 0.0)), "g0")],
        ),
    }
}
