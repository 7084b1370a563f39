//! Collective-spin model states in the symmetric (Dicke) subspace.
//!
//! Every state here is permutation-symmetric, and the collective
//! magnetization `M = sum_i s_z^(i)` preserves the symmetric subspace, so
//! all computations run in dimension `n + 1` instead of `2^n`. The Dicke
//! basis is indexed by the excitation number `k = 0..n`, with
//! magnetization eigenvalue `(n - 2k) / 2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coherence::{DensityMatrix, ObservableSpectrum, PureState};
use crate::numerics;
use crate::{Error, Result};

/// An ensemble of `n` spin-1/2 particles restricted to the symmetric
/// subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinEnsemble {
    n: usize,
}

impl SpinEnsemble {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "spin ensemble needs at least one particle".into(),
            ));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the symmetric subspace, `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// The collective magnetization spectrum: eigenvalue `(n - 2k) / 2`
    /// at Dicke index `k`, strictly decreasing with unit spacing.
    pub fn magnetization(&self) -> ObservableSpectrum {
        let n = self.n;
        let eigenvalues = (0..=n).map(|k| (n as f64 - 2.0 * k as f64) / 2.0).collect();
        ObservableSpectrum::with_label(eigenvalues, format!("magnetization(n={n})"))
            .expect("finite eigenvalues")
    }
}

/// The product state `(cos(theta) |0> + sin(theta) |1>)^(tensor n)` in the
/// Dicke basis: amplitude `sqrt(C(n,k)) cos^(n-k)(theta) sin^k(theta)` at
/// index `k`. Binomial weights are assembled in log space so `n` up to
/// several hundred stays finite.
pub fn product_state(ensemble: &SpinEnsemble, theta: f64) -> PureState {
    let n = ensemble.n();
    let (c, s) = (theta.cos(), theta.sin());
    let mut amplitudes = DVector::from_element(n + 1, Complex64::new(0.0, 0.0));
    if s == 0.0 {
        amplitudes[0] = Complex64::new(c.powi(n as i32).signum(), 0.0);
    } else if c == 0.0 {
        amplitudes[n] = Complex64::new(s.powi(n as i32).signum(), 0.0);
    } else {
        let (ln_c, ln_s) = (c.abs().ln(), s.abs().ln());
        for k in 0..=n {
            let magnitude =
                (0.5 * numerics::ln_binomial(n, k) + (n - k) as f64 * ln_c + k as f64 * ln_s)
                    .exp();
            let sign = c.signum().powi((n - k) as i32) * s.signum().powi(k as i32);
            amplitudes[k] = Complex64::new(sign * magnitude, 0.0);
        }
        let norm = amplitudes.norm();
        amplitudes /= Complex64::new(norm, 0.0);
    }
    PureState::new(ensemble.magnetization(), amplitudes).expect("normalized by construction")
}

/// The GHZ state `(|0>^n + |1>^n) / sqrt(2)`: equal amplitudes at the two
/// extremal Dicke indices.
pub fn ghz_state(ensemble: &SpinEnsemble) -> PureState {
    let n = ensemble.n();
    let mut amplitudes = DVector::from_element(n + 1, Complex64::new(0.0, 0.0));
    amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[n] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(ensemble.magnetization(), amplitudes).expect("normalized by construction")
}

/// The Dicke state `|n, k>` rotated by polar angle `theta` and azimuth
/// `phi` on the collective Bloch sphere.
///
/// The rotation is `exp[(theta/2) (e^{i phi} J_- - e^{-i phi} J_+)]` with
/// the standard collective ladder operators, computed by an
/// eigendecomposition-based matrix exponential in the symmetric subspace.
/// At `phi = 0` the amplitudes are the Wigner small-d matrix elements
/// `d^{n/2}_{m', m}(theta)`.
pub fn rotated_dicke(
    ensemble: &SpinEnsemble,
    k: usize,
    theta: f64,
    phi: f64,
) -> Result<PureState> {
    let n = ensemble.n();
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "Dicke excitation number {k} out of range for n = {n}"
        )));
    }
    let dim = n + 1;
    if theta == 0.0 {
        let mut amplitudes = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        amplitudes[k] = Complex64::new(1.0, 0.0);
        return PureState::new(ensemble.magnetization(), amplitudes);
    }

    // Anti-Hermitian generator G; the exponential is evaluated through the
    // Hermitian matrix H = iG as exp(G) = V exp(-i lambda) V^dagger.
    let half_theta = Complex64::new(0.5 * theta, 0.0);
    let phase = Complex64::from_polar(1.0, phi);
    let mut generator = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..=n {
        // J_+ : |k> -> sqrt(k (n - k + 1)) |k - 1>
        if col >= 1 {
            let coeff = ((col as f64) * (n - col + 1) as f64).sqrt();
            generator[(col - 1, col)] -=
                half_theta * phase.conj() * Complex64::new(coeff, 0.0);
        }
        // J_- : |k> -> sqrt((k + 1) (n - k)) |k + 1>
        if col < n {
            let coeff = ((col + 1) as f64 * (n - col) as f64).sqrt();
            generator[(col + 1, col)] += half_theta * phase * Complex64::new(coeff, 0.0);
        }
    }
    let hermitian = generator.map(|z| Complex64::new(-z.im, z.re)); // i * G
    let eig = numerics::eig_hermitian(&hermitian)?;

    // exp(G) e_k = V diag(exp(-i lambda)) V^dagger e_k
    let vk = eig.eigenvectors.row(k).transpose().conjugate();
    let rotated_coeffs = DVector::from_fn(dim, |j, _| {
        Complex64::from_polar(1.0, -eig.eigenvalues[j]) * vk[j]
    });
    let amplitudes = &eig.eigenvectors * rotated_coeffs;
    PureState::new(ensemble.magnetization(), amplitudes.normalize())
}

/// The partially decohered GHZ state
/// `(|0><0| + |n><n| + Gamma (|0><n| + |n><0|)) / 2` in the Dicke basis.
pub fn decohered_ghz(ensemble: &SpinEnsemble, gamma: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "decoherence parameter gamma must lie in [0, 1] (got {gamma})"
        )));
    }
    let n = ensemble.n();
    let mut m = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(n, n)] = Complex64::new(0.5, 0.0);
    m[(0, n)] = Complex64::new(0.5 * gamma, 0.0);
    m[(n, 0)] = Complex64::new(0.5 * gamma, 0.0);
    DensityMatrix::new(ensemble.magnetization(), m)
}
