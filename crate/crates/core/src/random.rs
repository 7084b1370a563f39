//! Seeded samplers for the random-state audits.
//!
//! Mixed states are Ginibre-induced (`rho = G G^dagger / Tr G G^dagger`
//! for a square complex Gaussian `G`), pure states are normalized complex
//! Gaussian vectors. Both are standard constructions and reproducible from
//! the caller's seeded generator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::coherence::{DensityMatrix, ObservableSpectrum, PureState};

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A Gaussian Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// A Ginibre-induced full-rank mixed state over the given spectrum.
pub fn random_density_matrix<R: Rng>(
    spectrum: ObservableSpectrum,
    rng: &mut R,
) -> DensityMatrix {
    let dim = spectrum.dim();
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let gram = &g * g.adjoint();
    let trace = gram.trace().re;
    let rho = gram * Complex64::new(1.0 / trace, 0.0);
    DensityMatrix::new(spectrum, rho).expect("Ginibre state is a valid density matrix")
}

/// A normalized Gaussian (Haar-like) pure state over the given spectrum.
pub fn random_pure_state<R: Rng>(spectrum: ObservableSpectrum, rng: &mut R) -> PureState {
    let dim = spectrum.dim();
    let v = DVector::from_fn(dim, |_, _| gaussian_complex(rng));
    PureState::new(spectrum, v.normalize()).expect("normalized vector is a valid pure state")
}

/// A spectrum with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn random_spectrum<R: Rng>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> ObservableSpectrum {
    let eigenvalues = (0..dim).map(|_| rng.gen_range(lo..hi)).collect();
    ObservableSpectrum::new(eigenvalues).expect("finite eigenvalues")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ginibre_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 2..=8 {
            let spectrum = random_spectrum(dim, -5.0, 5.0, &mut rng);
            let rho = random_density_matrix(spectrum, &mut rng);
            rho.check_valid().unwrap();
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let s = random_spectrum(4, -1.0, 1.0, &mut rng);
            random_density_matrix(s, &mut rng).matrix().clone()
        };
        assert_eq!(draw(), draw());
    }
}
