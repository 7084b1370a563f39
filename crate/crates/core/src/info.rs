//! Skew information, quantum Fisher information, variance, and the
//! fidelity lower bounds built from them.
//!
//! Two lower bounds on `sqrt(F(rho, Phi_sigma(rho)))` are provided:
//! `B_W = exp(-I_W / (4 sigma^2))` from the Wigner-Yanase-Dyson skew
//! information (with a tighter pure-state variant using the variance), and
//! `B_F = exp(-I_F / (32 sigma^2)) - erfc(sqrt(2) pi sigma / sqrt(I_F))`
//! from the quantum Fisher information. `B_W` is positive everywhere;
//! `B_F` turns negative once `I_F / sigma^2` exceeds roughly 37.8.

use num_complex::Complex64;

use crate::coherence::{CoarseChannel, DensityMatrix, PureState};
use crate::numerics;
use crate::{Error, Result};

/// Eigenvalue-pair cutoff in the Fisher information sum; pairs with
/// `lambda_i + lambda_j` below this are skipped, matching the
/// symmetric-logarithmic-derivative convention at zero-probability pairs.
pub const FISHER_PAIR_CUTOFF: f64 = 1e-12;

/// Wigner-Yanase-Dyson skew information
/// `I_W(rho, A) = -(1/2) Tr [sqrt(rho), A]^2`, evaluated as
/// `(1/2) sum_{i,j} (a_i - a_j)^2 |sqrt(rho)_ij|^2`.
///
/// Zero exactly when the state commutes with the observable; equals the
/// variance for pure states.
pub fn skew_information(rho: &DensityMatrix) -> Result<f64> {
    let root = numerics::matrix_sqrt_psd(rho.matrix())?;
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let gap = a[i] - a[j];
            if gap != 0.0 {
                total += gap * gap * root[(i, j)].norm_sqr();
            }
        }
    }
    Ok(0.5 * total)
}

/// Quantum Fisher information
/// `I_F(rho, A) = 2 sum_{i != j} (lambda_i - lambda_j)^2 / (lambda_i + lambda_j) |<psi_i|A|psi_j>|^2`.
///
/// Equals `4 Var_psi(A)` for pure states.
pub fn fisher_information(rho: &DensityMatrix) -> Result<f64> {
    let eig = numerics::eig_hermitian(rho.matrix())?;
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    // A in the eigenbasis of rho: B = V^dagger diag(a) V.
    let mut av = eig.eigenvectors.clone();
    for i in 0..dim {
        let ai = Complex64::new(a[i], 0.0);
        for j in 0..dim {
            av[(i, j)] *= ai;
        }
    }
    let b = eig.eigenvectors.adjoint() * av;
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let li = eig.eigenvalues[i].max(0.0);
            let lj = eig.eigenvalues[j].max(0.0);
            if li + lj < FISHER_PAIR_CUTOFF {
                continue;
            }
            let diff = li - lj;
            total += diff * diff / (li + lj) * b[(i, j)].norm_sqr();
        }
    }
    Ok(2.0 * total)
}

/// Variance of the observable in a pure state:
/// `sum_i p_i a_i^2 - (sum_i p_i a_i)^2`.
pub fn variance(psi: &PureState) -> f64 {
    let a = psi.spectrum().eigenvalues();
    let probs = psi.probabilities();
    let mean: f64 = a.iter().zip(&probs).map(|(&ai, &p)| p * ai).sum();
    let mean_sq: f64 = a.iter().zip(&probs).map(|(&ai, &p)| p * ai * ai).sum();
    (mean_sq - mean * mean).max(0.0)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok(())
}

fn check_nonnegative(value: f64, name: &str) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative (got {value})"
        )));
    }
    Ok(())
}

/// Skew-information fidelity bound `B_W = exp(-I_W / (4 sigma^2))`,
/// strictly positive for any inputs.
pub fn bound_w(i_w: f64, sigma: f64) -> Result<f64> {
    check_nonnegative(i_w, "skew information")?;
    check_sigma(sigma)?;
    Ok((-i_w / (4.0 * sigma * sigma)).exp())
}

/// Pure-state variant `exp(-Var / (8 sigma^2))`; always at least as large
/// as [`bound_w`] evaluated at `I_W = Var`.
pub fn bound_w_pure(variance: f64, sigma: f64) -> Result<f64> {
    check_nonnegative(variance, "variance")?;
    check_sigma(sigma)?;
    Ok((-variance / (8.0 * sigma * sigma)).exp())
}

/// Fisher-information fidelity bound
/// `B_F = exp(-I_F / (32 sigma^2)) - erfc(sqrt(2) pi sigma / sqrt(I_F))`.
///
/// May be negative (and therefore trivial); `I_F = 0` returns 1 by
/// continuous extension.
pub fn bound_f(i_f: f64, sigma: f64) -> Result<f64> {
    check_nonnegative(i_f, "Fisher information")?;
    check_sigma(sigma)?;
    if i_f == 0.0 {
        return Ok(1.0);
    }
    let gauss = (-i_f / (32.0 * sigma * sigma)).exp();
    let tail = numerics::erfc(std::f64::consts::SQRT_2 * std::f64::consts::PI * sigma / i_f.sqrt());
    Ok(gauss - tail)
}

/// Result of checking `4 I_W <= I_F <= 8 I_W`.
#[derive(Debug, Clone, Copy)]
pub struct SandwichCheck {
    pub i_w: f64,
    pub i_f: f64,
    pub holds: bool,
}

/// Verify the two-sided relation between the skew and Fisher informations,
/// with tolerance `1e-8 * (1 + I_F)`.
pub fn sandwich_check(rho: &DensityMatrix) -> Result<SandwichCheck> {
    let i_w = skew_information(rho)?;
    let i_f = fisher_information(rho)?;
    let tol = 1e-8 * (1.0 + i_f);
    let holds = 4.0 * i_w <= i_f + tol && i_f <= 8.0 * i_w + tol;
    Ok(SandwichCheck { i_w, i_f, holds })
}

/// Exact root fidelity together with both lower bounds at one `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub sigma: f64,
    pub fidelity_sqrt: f64,
    pub bound_w: f64,
    pub bound_f: f64,
    pub i_w: f64,
    pub i_f: f64,
    /// Present for pure states, in which case `bound_w` is the tighter
    /// variance form.
    pub variance: Option<f64>,
}

/// Evaluate `sqrt(F(rho, Phi_sigma(rho)))` and both bounds for a mixed
/// state.
pub fn bound_report(rho: &DensityMatrix, channel: &CoarseChannel) -> Result<BoundReport> {
    let damped = crate::coherence::apply_channel(rho, channel);
    let fidelity_sqrt = numerics::fidelity(rho.matrix(), damped.matrix())?.sqrt();
    let i_w = skew_information(rho)?;
    let i_f = fisher_information(rho)?;
    Ok(BoundReport {
        sigma: channel.sigma(),
        fidelity_sqrt,
        bound_w: bound_w(i_w, channel.sigma())?,
        bound_f: bound_f(i_f, channel.sigma())?,
        i_w,
        i_f,
        variance: None,
    })
}

/// Evaluate the report for a pure state: the fidelity comes from the fast
/// population sum, `I_W = Var`, `I_F = 4 Var`, and the W-bound uses the
/// tighter pure-state form.
pub fn bound_report_pure(psi: &PureState, channel: &CoarseChannel) -> Result<BoundReport> {
    let fidelity_sqrt = crate::coherence::pure_state_fidelity_fast(psi, channel).sqrt();
    let var = variance(psi);
    Ok(BoundReport {
        sigma: channel.sigma(),
        fidelity_sqrt,
        bound_w: bound_w_pure(var, channel.sigma())?,
        bound_f: bound_f(4.0 * var, channel.sigma())?,
        i_w: var,
        i_f: 4.0 * var,
        variance: Some(var),
    })
}

/// Locate the root of `B_F` as a function of `r = I_F / sigma^2` by
/// bisection. `B_F` depends on `I_F` and `sigma` only through `r`.
pub fn bound_f_negativity_threshold() -> f64 {
    let f = |r: f64| {
        (-r / 32.0).exp()
            - numerics::erfc(std::f64::consts::SQRT_2 * std::f64::consts::PI / r.sqrt())
    };
    let (mut lo, mut hi) = (1.0, 100.0);
    assert!(f(lo) > 0.0 && f(hi) < 0.0, "bracketing failed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
