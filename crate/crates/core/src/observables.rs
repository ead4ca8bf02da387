//! Expectation values recorded along a run.

use crate::linalg::{SparseOp, C64};
use crate::operators::QOperator;
use crate::space::{HilbertSpace, Level};
use alloc::vec::Vec;

/// Below this mean photon number the Mandel factor is reported as absent.
pub const MANDEL_MIN_PHOTONS: f64 = 1e-12;

/// Observables at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    pub tau: f64,
    /// `⟨a†a⟩`
    pub n_mean: f64,
    /// `⟨(a†a)²⟩`, kept so ensemble means can rebuild the Mandel factor.
    pub n_sq_mean: f64,
    pub sigma_z_mean: f64,
    /// `(⟨Δn²⟩ − ⟨n⟩)/⟨n⟩`, `None` when `⟨n⟩ < 1e-12`.
    pub mandel_q: Option<f64>,
    pub p_e: f64,
    /// `⟨N⟩` with `N = a†a + (σ_z + 𝕀)/2`.
    pub quanta_mean: f64,
    pub energy_mean: f64,
    /// `|tr ρ − 1|`, or `|⟨ψ|ψ⟩ − 1|` for pure states.
    pub trace_error: f64,
    /// Population of the two highest Fock levels.
    pub top_level_pop: f64,
}

pub fn mandel_q(n_mean: f64, n_sq_mean: f64) -> Option<f64> {
    if n_mean < MANDEL_MIN_PHOTONS {
        None
    } else {
        Some((n_sq_mean - n_mean * n_mean - n_mean) / n_mean)
    }
}

/// Time-ordered observable records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            records: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, r: ObservableRecord) {
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&ObservableRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&ObservableRecord> {
        self.records.last()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ObservableRecord> {
        self.records.iter()
    }

    pub fn column(&self, f: impl Fn(&ObservableRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.column(|r| r.tau)
    }

    pub fn n_means(&self) -> Vec<f64> {
        self.column(|r| r.n_mean)
    }
}

impl<'a> IntoIterator for &'a ObservableSeries {
    type Item = &'a ObservableRecord;
    type IntoIter = core::slice::Iter<'a, ObservableRecord>;
    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

/// Precomputed data for evaluating [`ObservableRecord`]s on one space.
///
/// `a†a`, `σ_z`, `|e⟩⟨e|` and `N` are diagonal in the `|s,n⟩` basis, so only
/// populations are needed for them; `⟨H⟩` uses the sparse Hamiltonian.
#[derive(Debug, Clone)]
pub struct Observables {
    space: HilbertSpace,
    photons: Vec<f64>,
    excited: Vec<bool>,
    top: Vec<bool>,
    hamiltonian: SparseOp,
}

impl Observables {
    pub fn new(hamiltonian: &QOperator) -> Self {
        let space = hamiltonian.space();
        let n_max = space.n_max();
        let top_lo = if n_max >= 2 { n_max - 1 } else { n_max };
        let photons = (0..space.dim()).map(|i| space.photons(i) as f64).collect();
        let excited = (0..space.dim())
            .map(|i| space.decompose(i).0 == Level::Excited)
            .collect();
        let top = (0..space.dim())
            .map(|i| space.photons(i) >= top_lo)
            .collect();
        Self {
            space,
            photons,
            excited,
            top,
            hamiltonian: hamiltonian.to_sparse(),
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    /// Swap in a new Hamiltonian for `⟨H⟩` (time-dependent runs).
    pub fn set_hamiltonian(&mut self, hamiltonian: SparseOp) {
        debug_assert_eq!(hamiltonian.dim(), self.space.dim());
        self.hamiltonian = hamiltonian;
    }

    fn record_populations(
        &self,
        t: f64,
        tau: f64,
        pops: impl Iterator<Item = f64>,
        energy: f64,
    ) -> ObservableRecord {
        let (mut norm, mut n1, mut n2, mut pe, mut top) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, p) in pops.enumerate() {
            let n = self.photons[i];
            norm += p;
            n1 += n * p;
            n2 += n * n * p;
            if self.excited[i] {
                pe += p;
            }
            if self.top[i] {
                top += p;
            }
        }
        ObservableRecord {
            t,
            tau,
            n_mean: n1,
            n_sq_mean: n2,
            sigma_z_mean: 2.0 * pe - norm,
            mandel_q: mandel_q(n1, n2),
            p_e: pe,
            quanta_mean: n1 + pe,
            energy_mean: energy,
            trace_error: (norm - 1.0).abs(),
            top_level_pop: top,
        }
    }

    /// Record for a row-major density matrix.
    pub fn of_density(&self, rho: &[C64], t: f64, tau: f64) -> ObservableRecord {
        let d = self.space.dim();
        debug_assert_eq!(rho.len(), d * d);
        let mut energy = C64::new(0.0, 0.0);
        for i in 0..d {
            for (j, h) in self.hamiltonian.row(i) {
                energy += h * rho[j * d + i];
            }
        }
        self.record_populations(t, tau, (0..d).map(|i| rho[i * d + i].re), energy.re)
    }

    /// Record for a state vector, normalized or not.
    pub fn of_pure(&self, psi: &[C64], t: f64, tau: f64) -> ObservableRecord {
        let d = self.space.dim();
        let mut energy = C64::new(0.0, 0.0);
        for i in 0..d {
            let hpsi: C64 = self.hamiltonian.row(i).map(|(j, h)| h * psi[j]).sum();
            energy += psi[i].conj() * hpsi;
        }
        self.record_populations(t, tau, psi.iter().map(|z| z.norm_sqr()), energy.re)
    }
}
