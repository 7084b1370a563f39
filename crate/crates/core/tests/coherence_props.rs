//! Structural audits of the coarse-grained channel: complete positivity,
//! trace preservation, sigma limits, agreement of the fast pure path with
//! the dense path, and mode covariance of the free operations.

use macrocoh::coherence::{
    apply_channel, apply_free, measure_m, mode_decompose, projective_dephase, CoarseChannel,
    DensityMatrix, DistanceMeasure, FreeOperation, ObservableSpectrum,
};
use macrocoh::numerics::{self, eig_hermitian};
use macrocoh::random;
use macrocoh::spin::{self, SpinEnsemble};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    let spectrum = random::random_spectrum(dim, -5.0, 5.0, rng);
    random::random_density_matrix(spectrum, rng)
}

/// A spectrum with degenerate sectors, e.g. eigenvalues drawn from a small
/// integer set.
fn degenerate_spectrum<R: Rng>(dim: usize, rng: &mut R) -> ObservableSpectrum {
    let eigenvalues = (0..dim).map(|_| rng.gen_range(0..3) as f64).collect();
    ObservableSpectrum::new(eigenvalues).unwrap()
}

#[test]
fn channel_is_trace_preserving_and_completely_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..50 {
        let dim = rng.gen_range(2..=6);
        let rho = random_state(dim, &mut rng);
        let sigma = 10f64.powf(rng.gen_range(-1.0..1.0));
        let channel = CoarseChannel::new(sigma).unwrap();
        let out = apply_channel(&rho, &channel);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(out.matrix().trace().im.abs() < 1e-12);
        out.check_valid().unwrap();

        // Choi matrix of the entrywise damping map: block (i, j) holds
        // Phi(|i><j|), whose only entry is the damped (i, j).
        let a = rho.spectrum().eigenvalues();
        let mut choi = DMatrix::<Complex64>::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                choi[(i * dim + i, j * dim + j)] =
                    Complex64::new(channel.damping(a[i] - a[j]), 0.0);
            }
        }
        let eig = eig_hermitian(&choi).unwrap();
        assert!(
            eig.eigenvalues[0] > -1e-10,
            "Choi matrix not PSD: min eigenvalue {}",
            eig.eigenvalues[0]
        );
    }
}

#[test]
fn measure_vanishes_in_the_infinite_sigma_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..20 {
        let dim = rng.gen_range(2..=8);
        let rho = random_state(dim, &mut rng);
        let sigma = 1e6 * rho.spectrum().max_abs_gap();
        let channel = CoarseChannel::new(sigma).unwrap();
        let m = measure_m(&rho, &channel, DistanceMeasure::Bures).unwrap();
        assert!(m < 1e-6, "M = {m} at sigma = {sigma}");
    }
}

#[test]
fn dephase_is_the_small_sigma_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..20 {
        let dim = rng.gen_range(2..=8);
        let rho = random_state(dim, &mut rng);
        let tiny = 1e-6 * rho.spectrum().min_nonzero_gap().unwrap();
        let channel = CoarseChannel::new(tiny).unwrap();
        let via_channel = apply_channel(&rho, &channel);
        let via_dephase = projective_dephase(&rho);
        assert!((via_channel.matrix() - via_dephase.matrix()).norm() < 1e-6);
    }
}

#[test]
fn fast_pure_path_matches_dense_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for trial in 0..100 {
        let dim = rng.gen_range(2..=8);
        let spectrum = random::random_spectrum(dim, -5.0, 5.0, &mut rng);
        let psi = random::random_pure_state(spectrum, &mut rng);
        let sigma = 10f64.powf(rng.gen_range(-0.5..1.0));
        let channel = CoarseChannel::new(sigma).unwrap();
        let fast = macrocoh::coherence::pure_state_fidelity_fast(&psi, &channel);
        let rho = psi.density_matrix();
        let damped = apply_channel(&rho, &channel);
        let dense = numerics::fidelity(rho.matrix(), damped.matrix()).unwrap();
        assert!(
            (fast - dense).abs() < 1e-8,
            "trial {trial}: fast {fast} vs dense {dense}"
        );
    }
}

#[test]
fn spin_fast_path_matches_dense_path_at_n64() {
    let ens = SpinEnsemble::new(64).unwrap();
    let channel = CoarseChannel::new(8.0).unwrap();
    for psi in [
        spin::product_state(&ens, std::f64::consts::FRAC_PI_4),
        spin::ghz_state(&ens),
        spin::rotated_dicke(&ens, 32, std::f64::consts::FRAC_PI_2, 0.0).unwrap(),
    ] {
        let fast = macrocoh::coherence::pure_state_fidelity_fast(&psi, &channel);
        let rho = psi.density_matrix();
        let damped = apply_channel(&rho, &channel);
        let dense = numerics::fidelity(rho.matrix(), damped.matrix()).unwrap();
        assert!((fast - dense).abs() < 1e-8, "fast {fast} vs dense {dense}");
    }
}

/// Free operations act entrywise, so they extend linearly to raw matrices;
/// this applies one deterministic branch (or one selective piece) to an
/// arbitrary matrix.
fn apply_linear_piece(
    m: &DMatrix<Complex64>,
    op: &FreeOperation,
    piece: usize,
    spectrum: &ObservableSpectrum,
) -> DMatrix<Complex64> {
    let dim = m.nrows();
    match op {
        FreeOperation::DiagonalPhaseUnitary(phases) => {
            let mut out = m.clone();
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] *= Complex64::from_polar(1.0, phases[i] - phases[j]);
                }
            }
            out
        }
        FreeOperation::ComposeCoarseChannel(channel) => {
            let a = spectrum.eigenvalues();
            let mut out = m.clone();
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] *= Complex64::new(channel.damping(a[i] - a[j]), 0.0);
                }
            }
            out
        }
        FreeOperation::SectorProjection(sectors) => {
            let mut out = DMatrix::<Complex64>::zeros(dim, dim);
            for &i in &sectors[piece] {
                for &j in &sectors[piece] {
                    out[(i, j)] = m[(i, j)];
                }
            }
            out
        }
    }
}

#[test]
fn free_operations_are_mode_covariant() {
    // E(rho^(delta)) = E(rho)^(delta) for every implemented family, checked
    // through the mode decompositions of input and output.
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    for _ in 0..30 {
        let dim = rng.gen_range(3..=6);
        let spectrum = degenerate_spectrum(dim, &mut rng);
        let rho = random::random_density_matrix(spectrum.clone(), &mut rng);
        let ops = [
            FreeOperation::DiagonalPhaseUnitary(
                (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            ),
            FreeOperation::ComposeCoarseChannel(CoarseChannel::new(0.7).unwrap()),
            FreeOperation::sector_projection_for(&spectrum),
        ];
        for op in &ops {
            let pieces = match op {
                FreeOperation::SectorProjection(sectors) => sectors.len(),
                _ => 1,
            };
            for piece in 0..pieces {
                let out = apply_linear_piece(rho.matrix(), op, piece, &spectrum);
                // Map each input mode component; it must equal the matching
                // mode of the mapped state.
                let a = spectrum.eigenvalues();
                for mode in mode_decompose(&rho) {
                    let mapped_component =
                        apply_linear_piece(&mode.component, op, piece, &spectrum);
                    let mut out_mode = DMatrix::<Complex64>::zeros(dim, dim);
                    for i in 0..dim {
                        for j in 0..dim {
                            if (a[i] - a[j] - mode.delta).abs() <= 1e-9 {
                                out_mode[(i, j)] = out[(i, j)];
                            }
                        }
                    }
                    assert!(
                        (mapped_component - out_mode).norm() < 1e-12,
                        "mode covariance violated at delta = {}",
                        mode.delta
                    );
                }
            }
        }
    }
}

#[test]
fn selective_branches_reassemble_to_dephased_sectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(206);
    for _ in 0..20 {
        let dim = rng.gen_range(3..=6);
        let spectrum = degenerate_spectrum(dim, &mut rng);
        let rho = random::random_density_matrix(spectrum.clone(), &mut rng);
        let op = FreeOperation::sector_projection_for(&spectrum);
        let branches = apply_free(&rho, &op).unwrap();
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, state) in &branches {
            sum += state.matrix() * Complex64::new(*p, 0.0);
        }
        // The non-selective sum is the sector dephasing of the input.
        let dephased = projective_dephase(&rho);
        assert!((sum - dephased.matrix()).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Mode components partition the entries and sum back exactly.
    #[test]
    fn mode_decompose_partitions_exactly(seed in any::<u64>(), dim in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spectrum = degenerate_spectrum(dim, &mut rng);
        let rho = random::random_density_matrix(spectrum, &mut rng);
        let modes = mode_decompose(&rho);
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        let mut seen = vec![false; dim * dim];
        for mode in &modes {
            for i in 0..dim {
                for j in 0..dim {
                    if mode.component[(i, j)] != Complex64::new(0.0, 0.0) {
                        prop_assert!(!seen[i * dim + j], "entry assigned twice");
                        seen[i * dim + j] = true;
                    }
                }
            }
            sum += &mode.component;
        }
        prop_assert_eq!(sum, rho.matrix().clone());
    }

    /// The channel never changes populations, for any sigma.
    #[test]
    fn channel_preserves_populations(seed in any::<u64>(), log_sigma in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(4, &mut rng);
        let channel = CoarseChannel::new(10f64.powf(log_sigma)).unwrap();
        let out = apply_channel(&rho, &channel);
        for i in 0..4 {
            prop_assert_eq!(out.matrix()[(i, i)], rho.matrix()[(i, i)]);
        }
    }
}
