//! Magnitude spectrum of the atomic-frequency noise `ω0(t) − Ω0`.

use rabi_core::ensemble::pairwise_sum;
use rabi_core::noise::{generate_noise_path, NoiseCfg, NoisePath};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Angular frequency `2πk/(N·dt)` for `k = 0..=N/2`.
    pub nu: Vec<f64>,
    pub magnitude: Vec<f64>,
}

impl Spectrum {
    /// Rectangle-rule integral of the magnitude over `lo ≤ ν ≤ hi`.
    pub fn band_integral(&self, lo: f64, hi: f64) -> f64 {
        let dnu = match self.nu.get(1) {
            Some(d) => *d,
            None => return 0.0,
        };
        let inside: Vec<f64> = self
            .nu
            .iter()
            .zip(&self.magnitude)
            .filter(|(nu, _)| **nu >= lo && **nu <= hi)
            .map(|(_, m)| *m)
            .collect();
        pairwise_sum(&inside) * dnu
    }
}

/// Unitary DFT `X_k = N^{-1/2} Σ_j x_j e^{−2πijk/N}` of a real series.
pub fn dft(samples: &[f64]) -> Vec<Complex<f64>> {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= norm);
    buf
}

fn one_sided(path: &NoisePath, omega0_mean: f64) -> Vec<f64> {
    let x: Vec<f64> = path.omega0.iter().map(|w| w - omega0_mean).collect();
    let n = x.len();
    dft(&x)[..n / 2 + 1].iter().map(|z| z.norm()).collect()
}

/// Ensemble-averaged magnitude spectrum of the given paths, which must share
/// length and step.
pub fn noise_spectrum(paths: &[NoisePath], omega0_mean: f64) -> Result<Spectrum> {
    let first = paths.first().ok_or(rabi_core::Error::EmptyInput)?;
    if first.is_empty() {
        return Err(rabi_core::Error::EmptyInput.into());
    }
    let n = first.len();
    if let Some(bad) = paths.iter().find(|p| p.len() != n || p.dt != first.dt) {
        return Err(rabi_core::Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        }
        .into());
    }
    let mags: Vec<Vec<f64>> = paths
        .par_iter()
        .map(|p| one_sided(p, omega0_mean))
        .collect();
    Ok(average(&mags, n, first.dt))
}

fn average(mags: &[Vec<f64>], n: usize, dt: f64) -> Spectrum {
    let bins = n / 2 + 1;
    let count = mags.len() as f64;
    let mut column = vec![0.0; mags.len()];
    let magnitude = (0..bins)
        .map(|k| {
            for (c, m) in column.iter_mut().zip(mags) {
                *c = m[k];
            }
            pairwise_sum(&column) / count
        })
        .collect();
    let nu = (0..bins)
        .map(|k| 2.0 * PI * k as f64 / (n as f64 * dt))
        .collect();
    Spectrum { nu, magnitude }
}

/// Spectrum over the `cfg.n_runs` paths of a noise ensemble, regenerating
/// each path from its seed.
pub fn ensemble_spectrum(pool: &rayon::ThreadPool, cfg: &NoiseCfg) -> Result<Spectrum> {
    cfg.validate()?;
    let n = cfg.n_steps();
    let mags: Vec<Vec<f64>> = pool.install(|| {
        (0..cfg.n_runs as u64)
            .into_par_iter()
            .map(|i| one_sided(&generate_noise_path(cfg, i), cfg.omega0_mean))
            .collect()
    });
    Ok(average(&mags, n, cfg.dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_of_single_tone() {
        let n = 64;
        let x: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * 5.0 * j as f64 / n as f64).cos())
            .collect();
        let f = dft(&x);
        let expected = (n as f64).sqrt() / 2.0;
        assert!((f[5].norm() - expected).abs() < 1e-12);
        assert!((f[n - 5].norm() - expected).abs() < 1e-12);
        assert!(f[3].norm() < 1e-12);
    }

    #[test]
    fn nu_axis_is_angular() {
        let path = NoisePath {
            dt: 0.05,
            omega0: vec![1.0; 200],
        };
        let s = noise_spectrum(&[path], 1.0).unwrap();
        assert_eq!(s.nu.len(), 101);
        assert!((s.nu[1] - 2.0 * PI / 10.0).abs() < 1e-15);
        assert!((s.nu[100] - PI / 0.05).abs() < 1e-12);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(noise_spectrum(&[], 1.0).is_err());
    }
}
