//! Operators on the truncated atom ⊗ field space.
//!
//! Ladder operators annihilate the top Fock level instead of wrapping
//! around: `a†|n_max⟩ = 0` and `E₊|n_max⟩ = 0`. How much population reaches
//! the edge is checked by the solvers, not here.

use crate::linalg::{CMatrix, SparseOp, C64};
use crate::params::SimParams;
use crate::space::HilbertSpace;
use num_traits::{One, Zero};

/// Hermiticity tolerance for operators flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A matrix on a [`HilbertSpace`], tagged with whether it is Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct QOperator {
    space: HilbertSpace,
    matrix: CMatrix,
    hermitian: bool,
}

impl QOperator {
    /// Panics if the matrix size does not match the space, or if
    /// `hermitian` is set for a matrix that is not Hermitian to
    /// [`HERMITIAN_TOL`].
    pub fn new(space: HilbertSpace, matrix: CMatrix, hermitian: bool) -> Self {
        assert_eq!(
            matrix.dim(),
            space.dim(),
            "operator size does not match space"
        );
        if hermitian {
            let defect = matrix.hermiticity_defect();
            assert!(
                defect <= HERMITIAN_TOL,
                "operator flagged Hermitian has defect {defect:e}"
            );
        }
        Self {
            space,
            matrix,
            hermitian,
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn to_sparse(&self) -> SparseOp {
        SparseOp::from_dense(&self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Product `self · rhs`. The result is never tagged Hermitian.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.space, rhs.space);
        Self {
            space: self.space,
            matrix: self.matrix.matmul(&rhs.matrix),
            hermitian: false,
        }
    }

    pub fn commutator(&self, rhs: &Self) -> CMatrix {
        self.matrix.commutator(&rhs.matrix)
    }

    pub fn apply(&self, v: &[C64]) -> alloc::vec::Vec<C64> {
        self.matrix.apply(v)
    }
}

type Atom2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

// Rows and columns are (g, e).
const ATOM_ID: Atom2 = [[ONE, ZERO], [ZERO, ONE]];
const ATOM_SZ: Atom2 = [[C64::new(-1.0, 0.0), ZERO], [ZERO, ONE]];
const ATOM_SPLUS: Atom2 = [[ZERO, ZERO], [ONE, ZERO]];
const ATOM_SMINUS: Atom2 = [[ZERO, ONE], [ZERO, ZERO]];
const ATOM_EXCITED: Atom2 = [[ZERO, ZERO], [ZERO, ONE]];

fn kron(space: HilbertSpace, atom: &Atom2, field: &CMatrix) -> CMatrix {
    let levels = space.n_levels();
    debug_assert_eq!(field.dim(), levels);
    let mut m = CMatrix::zeros(space.dim());
    for (s, atom_row) in atom.iter().enumerate() {
        for (s2, &a) in atom_row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for n in 0..levels {
                for n2 in 0..levels {
                    m[(s * levels + n, s2 * levels + n2)] = a * field[(n, n2)];
                }
            }
        }
    }
    m
}

fn field_identity(space: HilbertSpace) -> CMatrix {
    CMatrix::identity(space.n_levels())
}

fn field_annihilation(space: HilbertSpace) -> CMatrix {
    let mut a = CMatrix::zeros(space.n_levels());
    for n in 1..space.n_levels() {
        a[(n - 1, n)] = C64::new(libm::sqrt(n as f64), 0.0);
    }
    a
}

fn field_number(space: HilbertSpace) -> CMatrix {
    let mut m = CMatrix::zeros(space.n_levels());
    for n in 0..space.n_levels() {
        m[(n, n)] = C64::new(n as f64, 0.0);
    }
    m
}

fn field_lowering_unit(space: HilbertSpace) -> CMatrix {
    let mut e = CMatrix::zeros(space.n_levels());
    for n in 1..space.n_levels() {
        e[(n - 1, n)] = C64::one();
    }
    e
}

/// `(a, a†, a†a)` on the joint space.
pub fn field_ops(space: HilbertSpace) -> (QOperator, QOperator, QOperator) {
    let a = kron(space, &ATOM_ID, &field_annihilation(space));
    let a_dag = a.adjoint();
    let n = kron(space, &ATOM_ID, &field_number(space));
    (
        QOperator::new(space, a, false),
        QOperator::new(space, a_dag, false),
        QOperator::new(space, n, true),
    )
}

/// `(σ_z, σ₊, σ₋)` on the joint space, with `σ_z = |e⟩⟨e| − |g⟩⟨g|`.
pub fn atom_ops(space: HilbertSpace) -> (QOperator, QOperator, QOperator) {
    let id = field_identity(space);
    (
        QOperator::new(space, kron(space, &ATOM_SZ, &id), true),
        QOperator::new(space, kron(space, &ATOM_SPLUS, &id), false),
        QOperator::new(space, kron(space, &ATOM_SMINUS, &id), false),
    )
}

/// `|e⟩⟨e| ⊗ 𝕀`.
pub fn excited_projector(space: HilbertSpace) -> QOperator {
    QOperator::new(
        space,
        kron(space, &ATOM_EXCITED, &field_identity(space)),
        true,
    )
}

/// Unit-weight ladder operators `(E₋, E₊)` with `E₋|n⟩ = |n−1⟩`,
/// `E₋|0⟩ = 0` and `E₊ = E₋†`.
pub fn phase_ops(space: HilbertSpace) -> (QOperator, QOperator) {
    let e_minus = kron(space, &ATOM_ID, &field_lowering_unit(space));
    let e_plus = e_minus.adjoint();
    (
        QOperator::new(space, e_minus, false),
        QOperator::new(space, e_plus, false),
    )
}

/// Total number of quanta `N = a†a + (σ_z + 𝕀)/2`.
pub fn total_quanta(space: HilbertSpace) -> QOperator {
    let (_, _, n) = field_ops(space);
    let excited = excited_projector(space);
    QOperator::new(space, n.matrix() + excited.matrix(), true)
}

/// Which coupling the Hamiltonian keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// Full `g(σ₊ + σ₋)(a + a†)`.
    Rabi,
    /// Rotating-wave part `g(aσ₊ + a†σ₋)` only.
    JaynesCummings,
    /// `g(σ₊ + σ₋)(E₋ + E₊)`, the Rabi coupling with unit-weight ladders.
    PhaseOperator,
}

impl Coupling {
    pub fn hamiltonian(self, params: &SimParams, space: HilbertSpace) -> QOperator {
        match self {
            Coupling::Rabi => rabi_hamiltonian(params, space),
            Coupling::JaynesCummings => jc_hamiltonian(params, space),
            Coupling::PhaseOperator => phase_hamiltonian(params, space),
        }
    }
}

/// `ω a†a + (ω0/2) σ_z`.
fn free_part(params: &SimParams, space: HilbertSpace) -> CMatrix {
    let (_, _, n) = field_ops(space);
    let (sz, _, _) = atom_ops(space);
    &n.matrix().scale(C64::new(params.omega, 0.0))
        + &sz.matrix().scale(C64::new(0.5 * params.omega0, 0.0))
}

/// `H = ω a†a + (ω0/2)σ_z + g(σ₊ + σ₋)(a + a†)`.
pub fn rabi_hamiltonian(params: &SimParams, space: HilbertSpace) -> QOperator {
    let (a, a_dag, _) = field_ops(space);
    let (_, sp, sm) = atom_ops(space);
    let sx = sp.matrix() + sm.matrix();
    let field = a.matrix() + a_dag.matrix();
    let coupling = sx.matmul(&field).scale(C64::new(params.g, 0.0));
    QOperator::new(space, &free_part(params, space) + &coupling, true)
}

/// Rotating-wave Hamiltonian `ω a†a + (ω0/2)σ_z + g(aσ₊ + a†σ₋)`.
pub fn jc_hamiltonian(params: &SimParams, space: HilbertSpace) -> QOperator {
    let (a, a_dag, _) = field_ops(space);
    let (_, sp, sm) = atom_ops(space);
    let coupling = &a.matrix().matmul(sp.matrix()) + &a_dag.matrix().matmul(sm.matrix());
    QOperator::new(
        space,
        &free_part(params, space) + &coupling.scale(C64::new(params.g, 0.0)),
        true,
    )
}

/// `H_E = ω a†a + (ω0/2)σ_z + g(σ₊ + σ₋)(E₋ + E₊)`.
pub fn phase_hamiltonian(params: &SimParams, space: HilbertSpace) -> QOperator {
    let (em, ep) = phase_ops(space);
    let (_, sp, sm) = atom_ops(space);
    let sx = sp.matrix() + sm.matrix();
    let coupling = sx
        .matmul(&(em.matrix() + ep.matrix()))
        .scale(C64::new(params.g, 0.0));
    QOperator::new(space, &free_part(params, space) + &coupling, true)
}
