//! Truncated joint atom ⊗ field space.
//!
//! Basis ordering is atom-major: `|g,0⟩, |g,1⟩, …, |g,n_max⟩, |e,0⟩, …,
//! |e,n_max⟩`. Every matrix element in this crate relies on it.

use crate::error::{Error, Result};
use alloc::format;

/// Atomic level in the `|s,n⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    /// Keeps Fock levels `0..=n_max`. Rejects `n_max < 1`.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid(format!(
                "Fock cutoff must be at least 1, got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of Fock levels kept, `n_max + 1`.
    pub fn n_levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.n_levels()
    }

    pub fn index(&self, level: Level, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        match level {
            Level::Ground => n,
            Level::Excited => self.n_levels() + n,
        }
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn decompose(&self, index: usize) -> (Level, usize) {
        let levels = self.n_levels();
        if index < levels {
            (Level::Ground, index)
        } else {
            (Level::Excited, index - levels)
        }
    }

    /// Photon number of basis state `index`.
    pub fn photons(&self, index: usize) -> usize {
        self.decompose(index).1
    }
}

/// Shorthand for [`HilbertSpace::new`].
pub fn build_space(n_max: usize) -> Result<HilbertSpace> {
    HilbertSpace::new(n_max)
}
