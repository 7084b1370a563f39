//! Truncated Fock-space states and the quadrature coarse-grained
//! measurement realized on a discretized position grid.
//!
//! Conventions: `X = (a + a^dagger) / sqrt(2)`, so the vacuum has
//! `Var(X) = 1/2` and the position wavefunctions are the Hermite functions
//! with weight `exp(-x^2 / 2)`. The continuous observable is realized by
//! sampling wavefunctions on a symmetric grid; a grid density matrix over
//! the node spectrum then feeds the ordinary discrete channel machinery.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coherence::{
    measure_m, CoarseChannel, DensityMatrix, DistanceMeasure, ObservableSpectrum,
};
use crate::numerics;
use crate::{Error, Result};

/// Relative mass a grid must capture of a state's position distribution.
pub const GRID_MASS_TOL: f64 = 1e-8;

/// Truncated-norm loss allowed when building Fock-space states.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// Grid refinement must move `M` by less than this for convergence.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-4;

/// A Fock space truncated to number states `0 .. cutoff - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter(
                "Fock cutoff must be positive".into(),
            ));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Smallest cutoff admitting a coherent-type state of mean photon
    /// number `|alpha|^2`: `|alpha|^2 + 10 sqrt(|alpha|^2 + 1)`.
    pub fn required_cutoff(alpha_sq: f64) -> usize {
        (alpha_sq + 10.0 * (alpha_sq + 1.0).sqrt()).ceil() as usize
    }
}

/// A normalized pure state in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct BosonState {
    amplitudes: DVector<Complex64>,
}

impl BosonState {
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    /// `<a^dagger a>`.
    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    fn ladder_expectation(&self) -> Complex64 {
        // <a> = sum_n conj(c_{n-1}) sqrt(n) c_n
        (1..self.cutoff())
            .map(|n| self.amplitudes[n - 1].conj() * (n as f64).sqrt() * self.amplitudes[n])
            .sum()
    }

    fn ladder_sq_expectation(&self) -> Complex64 {
        // <a^2> = sum_n conj(c_{n-2}) sqrt(n (n-1)) c_n
        (2..self.cutoff())
            .map(|n| {
                self.amplitudes[n - 2].conj()
                    * ((n * (n - 1)) as f64).sqrt()
                    * self.amplitudes[n]
            })
            .sum()
    }

    /// `<X>` for `X = (a + a^dagger)/sqrt(2)`.
    pub fn quadrature_mean(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.ladder_expectation().re
    }

    /// `Var(X)`.
    pub fn quadrature_variance(&self) -> f64 {
        let x2 = self.ladder_sq_expectation().re + self.mean_photon_number() + 0.5;
        let x = self.quadrature_mean();
        (x2 - x * x).max(0.0)
    }
}

/// The coherent state `|alpha>` with amplitudes
/// `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` (log-space factorials).
pub fn coherent_state(fs: &FockSpace, alpha: Complex64) -> Result<BosonState> {
    let alpha_sq = alpha.norm_sqr();
    let required = FockSpace::required_cutoff(alpha_sq);
    if fs.cutoff() < required {
        return Err(Error::InsufficientCutoff {
            given: fs.cutoff(),
            required,
        });
    }
    let mut amplitudes = DVector::from_element(fs.cutoff(), Complex64::new(0.0, 0.0));
    if alpha_sq == 0.0 {
        amplitudes[0] = Complex64::new(1.0, 0.0);
        return Ok(BosonState { amplitudes });
    }
    let ln_abs = alpha.norm().ln();
    let arg = alpha.arg();
    for n in 0..fs.cutoff() {
        let magnitude =
            (-0.5 * alpha_sq + n as f64 * ln_abs - 0.5 * numerics::ln_factorial(n)).exp();
        amplitudes[n] = Complex64::from_polar(magnitude, n as f64 * arg);
    }
    // The untruncated norm is exactly 1; whatever is missing was lost to
    // the cutoff.
    normalize_with_loss_check(fs, amplitudes, 1.0)
}

/// The even cat state `|alpha> + |-alpha>` (normalized), `alpha > 0`.
/// Only even Fock amplitudes are nonzero.
pub fn cat_state(fs: &FockSpace, alpha: f64) -> Result<BosonState> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cat state amplitude must be positive (got {alpha})"
        )));
    }
    let alpha_sq = alpha * alpha;
    let required = FockSpace::required_cutoff(alpha_sq);
    if fs.cutoff() < required {
        return Err(Error::InsufficientCutoff {
            given: fs.cutoff(),
            required,
        });
    }
    let mut amplitudes = DVector::from_element(fs.cutoff(), Complex64::new(0.0, 0.0));
    for n in (0..fs.cutoff()).step_by(2) {
        let magnitude =
            (-0.5 * alpha_sq + n as f64 * alpha.ln() - 0.5 * numerics::ln_factorial(n)).exp();
        amplitudes[n] = Complex64::new(magnitude, 0.0);
    }
    // The even half of a unit coherent state carries (1 + e^{-2 alpha^2})/2
    // of the weight before renormalization.
    let even_mass = 0.5 * (1.0 + (-2.0 * alpha_sq).exp());
    normalize_with_loss_check(fs, amplitudes, even_mass)
}

/// The number state `|n>`.
pub fn fock_state(fs: &FockSpace, n: usize) -> Result<BosonState> {
    if n >= fs.cutoff() {
        return Err(Error::InsufficientCutoff {
            given: fs.cutoff(),
            required: n + 1,
        });
    }
    let mut amplitudes = DVector::from_element(fs.cutoff(), Complex64::new(0.0, 0.0));
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(BosonState { amplitudes })
}

/// Renormalize truncated amplitudes, rejecting the cutoff if the relative
/// mass lost against the untruncated norm exceeds [`TRUNCATION_TOL`].
fn normalize_with_loss_check(
    fs: &FockSpace,
    amplitudes: DVector<Complex64>,
    untruncated_mass: f64,
) -> Result<BosonState> {
    let mass: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let loss = (untruncated_mass - mass) / untruncated_mass;
    if loss > TRUNCATION_TOL || mass <= 0.0 {
        return Err(Error::InsufficientCutoff {
            given: fs.cutoff(),
            required: fs.cutoff() + 16,
        });
    }
    let amplitudes = amplitudes * Complex64::new(1.0 / mass.sqrt(), 0.0);
    Ok(BosonState { amplitudes })
}

/// A symmetric position grid with nodes `x_k = -L + k h`, `h = 2L/(points-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    extent: f64,
    points: usize,
}

impl QuadratureGrid {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !extent.is_finite() || extent <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid extent must be positive (got {extent})"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points (got {points})"
            )));
        }
        Ok(Self { extent, points })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|k| -self.extent + k as f64 * h).collect()
    }

    /// Halve the spacing while keeping the original nodes.
    pub fn refined(&self) -> Self {
        Self {
            extent: self.extent,
            points: 2 * self.points - 1,
        }
    }

    /// The grid nodes viewed as the spectrum of the discretized position
    /// observable. This is what makes the continuum channel a special case
    /// of the discrete one.
    pub fn spectrum(&self) -> ObservableSpectrum {
        ObservableSpectrum::with_label(self.nodes(), "position-grid").expect("finite nodes")
    }

    /// The default grid for a state at measurement precision `sigma`:
    /// extent per [`required_extent`], 2048 points.
    pub fn for_state(state: &BosonState, sigma: f64) -> Result<Self> {
        Self::new(required_extent(state, sigma), 2048)
    }
}

/// Grid extent needed for a state at precision `sigma`:
/// `sqrt(2) |<X>| + 6 sqrt(Var) + 6 min(sigma, sigma_cap)`.
///
/// The smoothing term is capped at the state's own spatial extent: once
/// the damping kernel is flat across the support of `|psi(x)|^2`, a larger
/// `sigma` acts as the identity and adds nothing but empty grid.
pub fn required_extent(state: &BosonState, sigma: f64) -> f64 {
    let center = std::f64::consts::SQRT_2 * state.quadrature_mean().abs();
    let spread = 6.0 * state.quadrature_variance().sqrt();
    let sigma_cap = center + spread + 3.0;
    center + spread + 6.0 * sigma.min(sigma_cap)
}

/// Sample `psi(x) = sum_n c_n phi_n(x)` on the grid, `phi_n` the Hermite
/// functions (vacuum variance 1/2), by the stable three-term recurrence.
///
/// Fails with a required-extent diagnostic when the grid captures less
/// than `1 - 1e-8` of the state's position mass, or is too coarse to
/// integrate it.
pub fn position_wavefunction(
    state: &BosonState,
    grid: &QuadratureGrid,
) -> Result<Vec<Complex64>> {
    let nodes = grid.nodes();
    let cutoff = state.cutoff();
    let mut psi = vec![Complex64::new(0.0, 0.0); nodes.len()];
    let norm0 = std::f64::consts::PI.powf(-0.25);
    for (k, &x) in nodes.iter().enumerate() {
        let mut phi_prev = 0.0f64;
        let mut phi = norm0 * (-x * x / 2.0).exp();
        let mut acc = state.amplitudes[0] * phi;
        for n in 1..cutoff {
            let next = (2.0 / n as f64).sqrt() * x * phi
                - ((n - 1) as f64 / n as f64).sqrt() * phi_prev;
            phi_prev = phi;
            phi = next;
            acc += state.amplitudes[n] * phi;
        }
        psi[k] = acc;
    }
    let mass: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.spacing();
    if (mass - 1.0).abs() > GRID_MASS_TOL {
        return Err(Error::GridMassDeficit {
            captured: mass,
            required: 1.0 - GRID_MASS_TOL,
            suggested_extent: required_extent(state, 0.0),
        });
    }
    Ok(psi)
}

/// The state as a density matrix on the grid-node spectrum:
/// `rho(x_k, x_l) = psi(x_k) conj(psi(x_l)) h`, renormalized to unit trace.
///
/// Feeding this through [`crate::coherence::apply_channel`] damps by
/// `exp(-(x_k - x_l)^2 / (8 sigma^2))`, the continuum kernel rule.
pub fn grid_density_matrix(state: &BosonState, grid: &QuadratureGrid) -> Result<DensityMatrix> {
    let psi = position_wavefunction(state, grid)?;
    let h = grid.spacing();
    let v = DVector::from_vec(psi);
    let mass: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let mut outer: DMatrix<Complex64> = &v * v.adjoint();
    // Rank-1 outer product of a vector: Hermitian and PSD by construction,
    // with the trace scaled to exactly 1.
    outer *= Complex64::new(h / mass, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(grid.spectrum(), outer))
}

/// `M_sigma` of a pure bosonic state under the quadrature measurement.
///
/// The Bures variant evaluates the pure-state fidelity double sum
/// `F = iint |psi(x)|^2 |psi(x')|^2 e^{-(x-x')^2/(8 sigma^2)} dx dx'`
/// as a Riemann sum on the grid; the relative-entropy variant goes through
/// the grid density matrix and the dense channel path (O(points^3)).
pub fn quadrature_measure_m(
    state: &BosonState,
    grid: &QuadratureGrid,
    channel: &CoarseChannel,
    distance: DistanceMeasure,
) -> Result<f64> {
    let needed = required_extent(state, channel.sigma());
    if grid.extent() < needed * (1.0 - 1e-12) {
        return Err(Error::InadequateGrid {
            given: grid.extent(),
            required: needed,
        });
    }
    match distance {
        DistanceMeasure::Bures => {
            let psi = position_wavefunction(state, grid)?;
            let h = grid.spacing();
            let nodes = grid.nodes();
            let prob: Vec<f64> = psi.iter().map(|z| z.norm_sqr() * h).collect();
            let mass: f64 = prob.iter().sum();
            // Fixed summation order: row partials combined in index order,
            // so results do not depend on any parallel schedule upstream.
            let mut f = 0.0;
            for k in 0..prob.len() {
                let mut row = prob[k] * prob[k];
                for l in (k + 1)..prob.len() {
                    row += 2.0 * prob[k] * prob[l] * channel.damping(nodes[k] - nodes[l]);
                }
                f += row;
            }
            f /= mass * mass;
            Ok(2.0 - 2.0 * f.clamp(0.0, 1.0).sqrt())
        }
        DistanceMeasure::RelativeEntropy => {
            let rho = grid_density_matrix(state, grid)?;
            measure_m(&rho, channel, distance)
        }
    }
}

/// [`quadrature_measure_m`] with an explicit grid-refinement convergence
/// check: the returned value comes from the refined grid and must agree
/// with the base grid within `1e-4`.
pub fn quadrature_measure_m_converged(
    state: &BosonState,
    grid: &QuadratureGrid,
    channel: &CoarseChannel,
    distance: DistanceMeasure,
) -> Result<f64> {
    let coarse = quadrature_measure_m(state, grid, channel, distance)?;
    let fine = quadrature_measure_m(state, &grid.refined(), channel, distance)?;
    if (fine - coarse).abs() > GRID_CONVERGENCE_TOL {
        return Err(Error::ConvergenceFailure(format!(
            "grid refinement moved M from {coarse} to {fine}"
        )));
    }
    Ok(fine)
}
