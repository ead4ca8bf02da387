use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, C64};
use crate::space::{HilbertSpace, Level};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Largest norm deficit tolerated when a coherent state is cut at `n_max`.
pub const COHERENT_DEFICIT_TOL: f64 = 1e-10;

/// Mean photon number `|α|²` used by the coherent-state presets.
pub const PRESET_ALPHA_SQ: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomState {
    Ground,
    Excited,
    /// `(|g⟩ + |e⟩)/√2`.
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState {
    Fock(usize),
    /// Coherent state with complex amplitude `re + i·im`.
    Coherent {
        re: f64,
        im: f64,
    },
}

impl FieldState {
    /// Real-amplitude coherent state with mean photon number `mean`.
    pub fn coherent_with_mean(mean: f64) -> Self {
        FieldState::Coherent {
            re: libm::sqrt(mean),
            im: 0.0,
        }
    }
}

/// Product initial state `atom ⊗ field`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub atom: AtomState,
    pub field: FieldState,
}

impl StateSpec {
    pub const fn new(atom: AtomState, field: FieldState) -> Self {
        Self { atom, field }
    }

    /// `|g,0⟩`.
    pub const fn ground() -> Self {
        Self::new(AtomState::Ground, FieldState::Fock(0))
    }

    /// `|e,0⟩`.
    pub const fn excited() -> Self {
        Self::new(AtomState::Excited, FieldState::Fock(0))
    }

    /// `|g,n⟩`.
    pub const fn ground_fock(n: usize) -> Self {
        Self::new(AtomState::Ground, FieldState::Fock(n))
    }

    /// The six initial states compared in the initial-state independence
    /// study, indexed 1 through 6:
    /// `|g,0⟩, |g,α⟩, |+,0⟩, |+,α⟩, |e,0⟩, |e,α⟩` with `|α|² = 0.05`.
    pub fn phi(k: usize) -> Option<Self> {
        let coherent = FieldState::coherent_with_mean(PRESET_ALPHA_SQ);
        let vacuum = FieldState::Fock(0);
        let spec = match k {
            1 => Self::new(AtomState::Ground, vacuum),
            2 => Self::new(AtomState::Ground, coherent),
            3 => Self::new(AtomState::Superposition, vacuum),
            4 => Self::new(AtomState::Superposition, coherent),
            5 => Self::new(AtomState::Excited, vacuum),
            6 => Self::new(AtomState::Excited, coherent),
            _ => return None,
        };
        Some(spec)
    }
}

/// Pure state on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes without normalizing them.
    pub fn from_amplitudes(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { space, amps })
    }

    pub fn basis(space: HilbertSpace, level: Level, n: usize) -> Self {
        let mut amps = vec![C64::zero(); space.dim()];
        amps[space.index(level, n)] = C64::new(1.0, 0.0);
        Self { space, amps }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(norm_sqr(&self.amps))
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|z| *z *= inv);
        }
    }
}

fn field_amplitudes(space: HilbertSpace, field: FieldState) -> Result<Vec<C64>> {
    let levels = space.n_levels();
    let mut amps = vec![C64::zero(); levels];
    match field {
        FieldState::Fock(n) => {
            if n > space.n_max() {
                return Err(Error::invalid(format!(
                    "Fock index {n} exceeds cutoff n_max = {}",
                    space.n_max()
                )));
            }
            amps[n] = C64::new(1.0, 0.0);
        }
        FieldState::Coherent { re, im } => {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::invalid("coherent amplitude must be finite"));
            }
            let alpha = C64::new(re, im);
            let mut c = C64::new(libm::exp(-0.5 * alpha.norm_sqr()), 0.0);
            amps[0] = c;
            for (n, slot) in amps.iter_mut().enumerate().skip(1) {
                c = c * alpha / libm::sqrt(n as f64);
                *slot = c;
            }
            let deficit = 1.0 - norm_sqr(&amps);
            if deficit > COHERENT_DEFICIT_TOL {
                return Err(Error::TruncationTooSmall {
                    n_max: space.n_max(),
                    deficit,
                });
            }
            let inv = 1.0 / libm::sqrt(norm_sqr(&amps));
            amps.iter_mut().for_each(|z| *z *= inv);
        }
    }
    Ok(amps)
}

/// Builds the unit-norm product state described by `spec`.
pub fn prepare_state(spec: &StateSpec, space: HilbertSpace) -> Result<StateVector> {
    let field = field_amplitudes(space, spec.field)?;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let (cg, ce) = match spec.atom {
        AtomState::Ground => (1.0, 0.0),
        AtomState::Excited => (0.0, 1.0),
        AtomState::Superposition => (h, h),
    };
    let mut amps = Vec::with_capacity(space.dim());
    amps.extend(field.iter().map(|&f| f * cg));
    amps.extend(field.iter().map(|&f| f * ce));
    Ok(StateVector { space, amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{field_ops, total_quanta};
    use crate::space::build_space;

    fn expect(op: &crate::QOperator, psi: &StateVector) -> f64 {
        let v = op.apply(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    #[test]
    fn ground_is_basis_vector() {
        let space = build_space(4).unwrap();
        let psi = prepare_state(&StateSpec::ground(), space).unwrap();
        assert_eq!(psi, StateVector::basis(space, Level::Ground, 0));
    }

    #[test]
    fn coherent_mean_photon_number() {
        for n_max in [10, 12, 20] {
            let space = build_space(n_max).unwrap();
            let psi = prepare_state(&StateSpec::phi(2).unwrap(), space).unwrap();
            let (_, _, n) = field_ops(space);
            assert!((expect(&n, &psi) - 0.05).abs() < 1e-10);
            assert!((psi.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fock_out_of_range() {
        let space = build_space(4).unwrap();
        assert!(matches!(
            prepare_state(&StateSpec::ground_fock(5), space),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn coherent_truncation_too_small() {
        let space = build_space(3).unwrap();
        let spec = StateSpec::new(AtomState::Ground, FieldState::coherent_with_mean(2.0));
        assert!(matches!(
            prepare_state(&spec, space),
            Err(Error::TruncationTooSmall { n_max: 3, .. })
        ));
    }

    #[test]
    fn preset_quanta() {
        // ⟨N_k⟩ = 0, 0.05, 0.5, 0.55, 1, 1.05
        let space = build_space(12).unwrap();
        let n = total_quanta(space);
        let expected = [0.0, 0.05, 0.5, 0.55, 1.0, 1.05];
        for (k, want) in (1..=6).zip(expected) {
            let psi = prepare_state(&StateSpec::phi(k).unwrap(), space).unwrap();
            assert!((expect(&n, &psi) - want).abs() < 1e-10, "phi_{k}");
        }
        assert!(StateSpec::phi(7).is_none());
    }
}
