//! Adaptive Dormand–Prince 5(4) integrator over complex state vectors.
//!
//! Both density matrices (flattened row-major) and state vectors are
//! integrated through the same stepper. A post-step hook runs after every
//! accepted step so callers can re-impose structure such as Hermiticity.

use crate::error::{Error, Result};
use crate::linalg::C64;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Tolerances and guards for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorCfg {
    pub atol: f64,
    pub rtol: f64,
    /// Smallest step allowed before giving up.
    pub h_min: f64,
    /// Largest step allowed, or `f64::INFINITY`.
    pub h_max: f64,
    /// Population allowed in the two highest Fock levels.
    pub trunc_tol: f64,
}

impl Default for IntegratorCfg {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-7,
            h_min: 1e-12,
            h_max: f64::INFINITY,
            trunc_tol: 1e-6,
        }
    }
}

impl IntegratorCfg {
    pub fn with_tolerances(mut self, atol: f64, rtol: f64) -> Self {
        self.atol = atol;
        self.rtol = rtol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(Error::invalid("integrator tolerances must be positive"));
        }
        if !(self.h_min > 0.0 && self.h_max > self.h_min) {
            return Err(Error::invalid("need 0 < h_min < h_max"));
        }
        if self.trunc_tol.is_nan() || self.trunc_tol <= 0.0 {
            return Err(Error::invalid("trunc_tol must be positive"));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Stateful stepper. Keeps the last proposed step size and the FSAL
/// derivative between calls to [`Dopri5::advance`].
pub struct Dopri5 {
    cfg: IntegratorCfg,
    h: Option<f64>,
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    y_new: Vec<C64>,
    fsal: bool,
    accepted: usize,
    rejected: usize,
}

impl Dopri5 {
    pub fn new(cfg: IntegratorCfg, dim: usize) -> Self {
        let z = || vec![C64::zero(); dim];
        Self {
            cfg,
            h: None,
            k: [z(), z(), z(), z(), z(), z(), z()],
            stage: z(),
            y_new: z(),
            fsal: false,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn accepted_steps(&self) -> usize {
        self.accepted
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    /// Forget the cached derivative. Call after modifying `y` outside
    /// [`Dopri5::advance`] (a quantum jump, a new Hamiltonian).
    pub fn invalidate(&mut self) {
        self.fsal = false;
    }

    fn error_norm(&self, y: &[C64]) -> f64 {
        let (atol, rtol) = (self.cfg.atol, self.cfg.rtol);
        let k = &self.k;
        let mut acc = 0.0;
        for i in 0..y.len() {
            let e = k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7;
            let sc = atol + rtol * y[i].norm().max(self.y_new[i].norm());
            acc += e.norm_sqr() / (sc * sc);
        }
        libm::sqrt(acc / y.len().max(1) as f64)
    }

    fn initial_step<F>(&mut self, t: f64, y: &[C64], rhs: &mut F) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let (atol, rtol) = (self.cfg.atol, self.cfg.rtol);
        let n = y.len().max(1) as f64;
        let scale = |z: C64| atol + rtol * z.norm();
        let sq = |x: f64| x * x;
        let d0 = libm::sqrt(y.iter().map(|z| sq(z.norm() / scale(*z))).sum::<f64>() / n);
        let d1 = libm::sqrt(
            y.iter()
                .zip(&self.k[0])
                .map(|(z, f)| sq(f.norm() / scale(*z)))
                .sum::<f64>()
                / n,
        );
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        for (s, (z, f)) in self.stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = z + f * h0;
        }
        rhs(t + h0, &self.stage, &mut self.k[1]);
        let d2 = libm::sqrt(
            y.iter()
                .zip(self.k[1].iter().zip(&self.k[0]))
                .map(|(z, (f1, f0))| sq((f1 - f0).norm() / scale(*z)))
                .sum::<f64>()
                / n,
        ) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / d1.max(d2), 0.2)
        };
        (100.0 * h0).min(h1).min(self.cfg.h_max)
    }

    /// Integrate `y` from `*t` to `t_end`, landing on `t_end` exactly.
    pub fn advance<F, P>(
        &mut self,
        t: &mut f64,
        t_end: f64,
        y: &mut [C64],
        rhs: &mut F,
        post_step: &mut P,
    ) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(&mut [C64]),
    {
        debug_assert_eq!(y.len(), self.stage.len());
        if t_end <= *t {
            return Ok(());
        }
        if !self.fsal {
            rhs(*t, y, &mut self.k[0]);
            self.fsal = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(*t, y, rhs),
        };

        while *t < t_end {
            let remaining = t_end - *t;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            if h_try < self.cfg.h_min && !last {
                return Err(Error::StepUnderflow { t: *t, h: h_try });
            }
            self.try_step(*t, h_try, y, rhs);
            let err = self.error_norm(y);
            if !err.is_finite() {
                self.rejected += 1;
                h = h_try * FAC_MIN;
                if h < self.cfg.h_min {
                    return Err(Error::StepUnderflow { t: *t, h });
                }
                continue;
            }
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * libm::pow(err, -0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if err <= 1.0 {
                self.accepted += 1;
                *t = if last { t_end } else { *t + h_try };
                y.copy_from_slice(&self.y_new);
                post_step(y);
                self.k.swap(0, 6);
                // A clamped final step says nothing about the natural size.
                let proposal = h_try * fac;
                h = if last { h.max(proposal) } else { proposal };
                h = h.min(self.cfg.h_max);
            } else {
                self.rejected += 1;
                h = h_try * fac.min(1.0);
                if h < self.cfg.h_min {
                    return Err(Error::StepUnderflow { t: *t, h });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }

    fn try_step<F>(&mut self, t: f64, h: f64, y: &[C64], rhs: &mut F)
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        macro_rules! stage {
            ($out:expr, $c:expr, [$(($a:expr, $k:expr)),*]) => {{
                for i in 0..n {
                    let mut acc = y[i];
                    $( acc += self.k[$k][i] * (h * $a); )*
                    self.stage[i] = acc;
                }
                let (_, hi) = self.k.split_at_mut($out);
                rhs(t + $c * h, &self.stage, &mut hi[0]);
            }};
        }
        stage!(1, C2, [(A21, 0)]);
        stage!(2, C3, [(A31, 0), (A32, 1)]);
        stage!(3, C4, [(A41, 0), (A42, 1), (A43, 2)]);
        stage!(4, C5, [(A51, 0), (A52, 1), (A53, 2), (A54, 3)]);
        stage!(5, 1.0, [(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)]);
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            self.y_new[i] = y[i]
                + (self.k[0][i] * B1
                    + self.k[2][i] * B3
                    + self.k[3][i] * B4
                    + self.k[4][i] * B5
                    + self.k[5][i] * B6)
                    * h;
        }
        rhs(t + h, &self.y_new, &mut self.k[6]);
    }
}
