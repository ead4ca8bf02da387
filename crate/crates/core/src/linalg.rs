//! Small dense and sparse complex matrices.
//!
//! Dimensions here are at most a few hundred, so a flat row-major `Vec` is
//! all the dense type needs. Solvers convert operators to [`SparseOp`] once
//! and do the heavy lifting with sparse × dense products.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
use num_complex::Complex;
use num_traits::Zero;

pub type C64 = Complex<f64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Wraps row-major data. Panics unless `data.len() == dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major buffer has wrong length");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].is_zero()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Compressed-row sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &CMatrix) -> Self {
        let n = m.dim();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if !v.is_zero() {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim: n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_dense(&self.to_dense().adjoint())
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `out = self · x`.
    pub fn mul_vec(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `out += s · self · m` for row-major dense `m`.
    pub fn left_mul_acc(&self, s: C64, m: &[C64], out: &mut [C64]) {
        let n = self.dim;
        for i in 0..n {
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, v) in self.row(i) {
                let sv = s * v;
                for (d, &b) in dst.iter_mut().zip(&m[k * n..(k + 1) * n]) {
                    *d += sv * b;
                }
            }
        }
    }

    /// `out += s · m · self` for row-major dense `m`.
    pub fn right_mul_acc(&self, s: C64, m: &[C64], out: &mut [C64]) {
        let n = self.dim;
        for i in 0..n {
            let src = &m[i * n..(i + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, &a) in src.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let sa = s * a;
                for (j, v) in self.row(k) {
                    dst[j] += sa * v;
                }
            }
        }
    }
}

/// Squared Euclidean norm.
pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `exp(−iHt)` for a real symmetric `H`, through its eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    dim: usize,
    /// Eigenvectors as rows, so `v[k·dim + i]` is component `i` of vector `k`.
    v: Vec<f64>,
    energies: Vec<f64>,
    coeff: Vec<C64>,
}

impl SpectralPropagator {
    /// `None` unless `h` is real and symmetric to within `1e-14`.
    pub fn new(h: &CMatrix) -> Option<Self> {
        let dim = h.dim();
        let mut real = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = h[(i, j)];
                if z.im.abs() > 1e-14 || (z.re - h[(j, i)].re).abs() > 1e-14 {
                    return None;
                }
                real[(i, j)] = z.re;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(real);
        let mut v = vec![0.0; dim * dim];
        for k in 0..dim {
            for i in 0..dim {
                v[k * dim + i] = eig.eigenvectors[(i, k)];
            }
        }
        Some(Self {
            dim,
            v,
            energies: eig.eigenvalues.iter().copied().collect(),
            coeff: vec![C64::zero(); dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `ψ ← exp(−iHt) ψ`.
    pub fn propagate(&mut self, psi: &mut [C64], t: f64) {
        let n = self.dim;
        for (k, c) in self.coeff.iter_mut().enumerate() {
            let row = &self.v[k * n..(k + 1) * n];
            let mut acc = C64::zero();
            for (&vi, p) in row.iter().zip(psi.iter()) {
                acc += p * vi;
            }
            let phase = -self.energies[k] * t;
            *c = acc * C64::new(libm::cos(phase), libm::sin(phase));
        }
        psi.iter_mut().for_each(|p| *p = C64::zero());
        for (k, c) in self.coeff.iter().enumerate() {
            let row = &self.v[k * n..(k + 1) * n];
            for (&vi, p) in row.iter().zip(psi.iter_mut()) {
                *p += c * vi;
            }
        }
    }
}
