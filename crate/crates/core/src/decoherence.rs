//! Environment-coupling decoherence and its equivalence to the
//! coarse-grained measurement.
//!
//! Linear coupling of the observable to an environment momentum with a
//! Gaussian diagonal `<p|tau_E|p> ~ exp(-mu^2 p^2)` damps each mode by
//! `exp(-(g t)^2 delta^2 / (4 mu^2))` after time `t` — the same entrywise
//! rule as the measurement channel at `sigma = mu / (sqrt(2) g t)`. The
//! distance between the initial and decohered state (the fragility) is
//! therefore exactly `M_sigma` at the mapped precision. Units use
//! `hbar = 1`.

use num_complex::Complex64;

use crate::coherence::{DensityMatrix, DistanceMeasure};
use crate::{Error, Result};

/// Linear system-environment coupling: strength `g`, elapsed time `t`, and
/// the width parameter `mu` of the environment momentum distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    g: f64,
    t: f64,
    mu: f64,
}

impl CouplingParams {
    pub fn new(g: f64, t: f64, mu: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling constant g must be positive (got {g})"
            )));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "environment width mu must be positive (got {mu})"
            )));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "time t must be non-negative (got {t})"
            )));
        }
        Ok(Self { g, t, mu })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The measurement precision this decoherence is equivalent to:
    /// `sigma = mu / (sqrt(2) g t)`. `None` at `t = 0`, where the channel
    /// is the identity (sigma diverges).
    pub fn effective_sigma(&self) -> Option<f64> {
        if self.t == 0.0 {
            None
        } else {
            Some(self.mu / (std::f64::consts::SQRT_2 * self.g * self.t))
        }
    }

    /// Mode damping factor `exp(-(g t)^2 delta^2 / (4 mu^2))`.
    pub fn damping(&self, delta: f64) -> f64 {
        let gt = self.g * self.t;
        (-(gt * gt) * delta * delta / (4.0 * self.mu * self.mu)).exp()
    }
}

/// A single-mode harmonic bath at inverse temperature `beta`, frequency
/// `omega`, coupled through its momentum for time `t` at strength `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBathParams {
    pub beta: f64,
    pub omega: f64,
    pub g: f64,
    pub t: f64,
}

impl ThermalBathParams {
    pub fn new(beta: f64, omega: f64, g: f64, t: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("omega", omega), ("g", g), ("t", t)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive (got {v})"
                )));
            }
        }
        Ok(Self { beta, omega, g, t })
    }

    /// The equivalent Gaussian coupling: the thermal momentum diagonal is
    /// `exp(-tanh(beta omega / 2) p^2)`, i.e. `mu = sqrt(tanh(beta omega / 2))`.
    pub fn coupling(&self) -> CouplingParams {
        CouplingParams::new(self.g, self.t, (0.5 * self.beta * self.omega).tanh().sqrt())
            .expect("positive parameters")
    }
}

/// Measurement precision equivalent to a thermal bath:
/// `sigma = sqrt(tanh(beta omega / 2) / (2 g^2 t^2))`.
///
/// Monotone increasing in `beta` (a colder bath disturbs less) and
/// decreasing in `g` and `t`.
pub fn sigma_from_thermal(tb: &ThermalBathParams) -> f64 {
    ((0.5 * tb.beta * tb.omega).tanh() / (2.0 * tb.g * tb.g * tb.t * tb.t)).sqrt()
}

/// Evolve a state through the decoherence channel:
/// `rho(t)_ij = exp(-(g t)^2 (a_i - a_j)^2 / (4 mu^2)) rho_ij`.
pub fn decohere(rho: &DensityMatrix, params: &CouplingParams) -> DensityMatrix {
    if params.t == 0.0 {
        return rho.clone();
    }
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let mut out = rho.matrix().clone();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                out[(i, j)] *= Complex64::new(params.damping(a[i] - a[j]), 0.0);
            }
        }
    }
    DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), out)
}

/// Fragility of a state under this decoherence: `D(rho_0, rho(t))`.
///
/// Coincides with `M_sigma(rho_0)` at `sigma = mu / (sqrt(2) g t)`.
pub fn fragility(
    rho: &DensityMatrix,
    params: &CouplingParams,
    distance: DistanceMeasure,
) -> Result<f64> {
    let decohered = decohere(rho, params);
    let d = distance.evaluate(rho.matrix(), decohered.matrix())?;
    if d.is_infinite() {
        return Err(Error::SupportViolation);
    }
    Ok(d)
}
