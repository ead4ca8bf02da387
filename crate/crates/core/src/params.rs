use crate::error::{Error, Result};
use alloc::format;

/// Physical parameters in units where the cavity frequency sets the scale.
///
/// `gamma_ph`, `gamma` and `kappa` are the dephasing, atomic and cavity
/// rates; `n_t` is the thermal photon number shared by both damping
/// reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub gamma_ph: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub n_t: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega0: 1.0,
            g: 0.1,
            gamma_ph: 0.0,
            gamma: 0.0,
            kappa: 0.0,
            n_t: 0.0,
        }
    }
}

impl SimParams {
    /// Resonant parameters with coupling `g` and no dissipation.
    pub fn resonant(g: f64) -> Self {
        Self {
            g,
            ..Self::default()
        }
    }

    /// Detuning `omega0 - omega`.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.omega0 = self.omega + delta;
        self
    }

    /// Sets `(gamma_ph, gamma, kappa)`.
    pub fn with_rates(mut self, gamma_ph: f64, gamma: f64, kappa: f64) -> Self {
        self.gamma_ph = gamma_ph;
        self.gamma = gamma;
        self.kappa = kappa;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega", self.omega),
            ("omega0", self.omega0),
            ("g", self.g),
            ("gamma_ph", self.gamma_ph),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("n_t", self.n_t),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        for (name, v) in [
            ("g", self.g),
            ("gamma_ph", self.gamma_ph),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("n_t", self.n_t),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detuning_is_derived() {
        let p = SimParams::resonant(0.1).with_detuning(-0.2);
        assert!((p.detuning() + 0.2).abs() < 1e-15);
        assert!((p.omega0 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_rates() {
        let p = SimParams::default().with_rates(0.1, -1e-3, 0.0);
        assert!(matches!(p.validate(), Err(Error::InvalidArgument(m)) if m.contains("gamma")));
        let p = SimParams {
            omega: 0.0,
            ..SimParams::default()
        };
        assert!(p.validate().is_err());
    }
}
