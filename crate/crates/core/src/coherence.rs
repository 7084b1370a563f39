//! The measurement observable, mode decomposition, the coarse-grained
//! channel, free operations, and the disturbance measure `M_sigma`.
//!
//! The observable `A = sum_i a_i |i><i|` fixes a basis and a set of
//! eigenvalue gaps `Delta = {a_i - a_j}`. A state decomposes into mode
//! components `rho^(delta)` connecting basis states whose eigenvalues
//! differ by exactly `delta`. The Gaussian coarse-grained measurement of
//! precision `sigma` damps each mode by `exp(-delta^2 / (8 sigma^2))`, and
//! the measure is the distance between a state and its damped image.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::numerics;
use crate::{Error, Result};

/// Absolute tolerance when merging eigenvalue gaps into modes. Gaps closer
/// than this are treated as the same physical mode; floating-point
/// eigenvalue arithmetic must not split identical gaps.
pub const GAP_MERGE_TOL: f64 = 1e-9;

/// Branch probabilities below this are dropped from selective operations.
pub const BRANCH_PROB_CUTOFF: f64 = 1e-12;

/// Eigenvalues of the measurement observable in its own eigenbasis.
///
/// Repeated eigenvalues are allowed and define degenerate sectors whose
/// internal coherence is never damped.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpectrum {
    eigenvalues: Vec<f64>,
    label: Option<String>,
}

impl ObservableSpectrum {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter(
                "spectrum must contain at least one eigenvalue".into(),
            ));
        }
        if let Some(bad) = eigenvalues.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectrum eigenvalues must be finite (got {bad})"
            )));
        }
        Ok(Self {
            eigenvalues,
            label: None,
        })
    }

    pub fn with_label(eigenvalues: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let mut s = Self::new(eigenvalues)?;
        s.label = Some(label.into());
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// The distinct gap set `Delta = {a_i - a_j}`, merged at
    /// [`GAP_MERGE_TOL`], sorted ascending. Closed under negation and
    /// contains 0 by construction.
    pub fn gaps(&self) -> Vec<f64> {
        let positives = self.positive_gaps();
        let mut all = Vec::with_capacity(2 * positives.len() + 1);
        all.extend(positives.iter().map(|g| -g));
        all.push(0.0);
        all.extend(positives.iter().copied());
        all.sort_by(f64::total_cmp);
        all
    }

    /// Distinct positive gaps, merged at [`GAP_MERGE_TOL`], ascending.
    fn positive_gaps(&self) -> Vec<f64> {
        let n = self.dim();
        let mut raw = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in 0..n {
                let d = self.eigenvalues[i] - self.eigenvalues[j];
                if d > 0.0 {
                    raw.push(d);
                }
            }
        }
        raw.sort_by(f64::total_cmp);
        let mut clusters: Vec<f64> = Vec::new();
        let mut start = 0;
        for k in 1..=raw.len() {
            if k == raw.len() || raw[k] - raw[k - 1] > GAP_MERGE_TOL {
                let cluster = &raw[start..k];
                let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
                // A gap indistinguishable from zero belongs to the zero mode.
                if mean > GAP_MERGE_TOL {
                    clusters.push(mean);
                }
                start = k;
            }
        }
        clusters
    }

    pub fn min_nonzero_gap(&self) -> Option<f64> {
        self.positive_gaps().first().copied()
    }

    pub fn max_abs_gap(&self) -> f64 {
        self.positive_gaps().last().copied().unwrap_or(0.0)
    }

    /// Indices grouped by equal eigenvalue (within [`GAP_MERGE_TOL`]),
    /// ordered by ascending eigenvalue.
    pub fn sector_partition(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| self.eigenvalues[a].total_cmp(&self.eigenvalues[b]));
        let mut sectors: Vec<Vec<usize>> = Vec::new();
        for &idx in &order {
            match sectors.last_mut() {
                Some(sector)
                    if (self.eigenvalues[idx] - self.eigenvalues[sector[0]]).abs()
                        <= GAP_MERGE_TOL =>
                {
                    sector.push(idx)
                }
                _ => sectors.push(vec![idx]),
            }
        }
        sectors
    }
}

/// A density matrix expressed in the eigenbasis of its observable.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    spectrum: ObservableSpectrum,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian within 1e-12, trace 1 within
    /// 1e-10, PSD within 1e-10.
    pub fn new(spectrum: ObservableSpectrum, matrix: DMatrix<Complex64>) -> Result<Self> {
        let state = Self::from_parts_unchecked(spectrum, matrix);
        state.check_valid()?;
        Ok(state)
    }

    /// Constructor for matrices valid by construction (channel outputs,
    /// normalized projections, outer products of unit vectors). Dimensions
    /// are still enforced.
    pub(crate) fn from_parts_unchecked(
        spectrum: ObservableSpectrum,
        matrix: DMatrix<Complex64>,
    ) -> Self {
        assert_eq!(
            spectrum.dim(),
            matrix.nrows(),
            "spectrum/matrix dimension mismatch"
        );
        assert_eq!(matrix.nrows(), matrix.ncols(), "density matrix not square");
        Self { spectrum, matrix }
    }

    /// Re-run the full validity checks (useful when auditing channel
    /// outputs in tests).
    pub fn check_valid(&self) -> Result<()> {
        let m = &self.matrix;
        let defect = {
            let mut worst = 0.0f64;
            for i in 0..m.nrows() {
                for j in i..m.ncols() {
                    worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                }
            }
            worst
        };
        if defect > 1e-12 {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = numerics::eig_hermitian(m)?;
        let lambda_min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if lambda_min < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(lambda_min));
        }
        Ok(())
    }

    pub fn spectrum(&self) -> &ObservableSpectrum {
        &self.spectrum
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// Populations in the observable eigenbasis.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// A normalized pure state over an observable spectrum.
#[derive(Debug, Clone)]
pub struct PureState {
    spectrum: ObservableSpectrum,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(spectrum: ObservableSpectrum, amplitudes: DVector<Complex64>) -> Result<Self> {
        if spectrum.dim() != amplitudes.len() {
            return Err(Error::DimensionMismatch(spectrum.dim(), amplitudes.len()));
        }
        let norm_sq = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self {
            spectrum,
            amplitudes,
        })
    }

    pub fn spectrum(&self) -> &ObservableSpectrum {
        &self.spectrum
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Outcome probabilities `|<i|psi>|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Promote to a density matrix `|psi><psi|`.
    pub fn density_matrix(&self) -> DensityMatrix {
        let norm_sq = self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let outer = numerics::outer_product(&self.amplitudes) * Complex64::new(1.0 / norm_sq, 0.0);
        DensityMatrix::from_parts_unchecked(self.spectrum.clone(), outer)
    }
}

/// The Gaussian coarse-grained measurement of precision `sigma > 0`.
///
/// The strictly projective limit is a separate operation,
/// [`projective_dephase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseChannel {
    sigma: f64,
}

impl CoarseChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::NonPositiveSigma(sigma));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The damping factor `exp(-delta^2 / (8 sigma^2))` for one gap.
    pub fn damping(&self, delta: f64) -> f64 {
        (-delta * delta / (8.0 * self.sigma * self.sigma)).exp()
    }
}

/// Distance used to quantify the disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMeasure {
    Bures,
    RelativeEntropy,
}

impl DistanceMeasure {
    /// Evaluate the distance on raw density matrices. The relative-entropy
    /// variant may legitimately return `f64::INFINITY`.
    pub fn evaluate(&self, rho: &DMatrix<Complex64>, tau: &DMatrix<Complex64>) -> Result<f64> {
        match self {
            DistanceMeasure::Bures => numerics::bures_distance(rho, tau),
            DistanceMeasure::RelativeEntropy => numerics::relative_entropy(rho, tau),
        }
    }
}

/// One component `rho^(delta)` of the mode decomposition.
#[derive(Debug, Clone)]
pub struct ModeComponent {
    pub delta: f64,
    pub component: DMatrix<Complex64>,
}

/// Split a state into its mode components `rho^(delta)`.
///
/// Every matrix entry is assigned to exactly one gap (the nearest member
/// of the merged gap set), so the components sum back to the input
/// bit-exactly. Components with no nonzero entry are omitted; the result
/// is sorted by ascending `delta`.
pub fn mode_decompose(rho: &DensityMatrix) -> Vec<ModeComponent> {
    let gaps = rho.spectrum().gaps();
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let mut components: Vec<DMatrix<Complex64>> =
        vec![DMatrix::zeros(dim, dim); gaps.len()];
    let mut nonzero = vec![false; gaps.len()];
    for i in 0..dim {
        for j in 0..dim {
            let k = nearest_gap_index(&gaps, a[i] - a[j]);
            let z = rho.matrix()[(i, j)];
            components[k][(i, j)] = z;
            if z != Complex64::new(0.0, 0.0) {
                nonzero[k] = true;
            }
        }
    }
    gaps.into_iter()
        .zip(components)
        .zip(nonzero)
        .filter(|(_, nz)| *nz)
        .map(|((delta, component), _)| ModeComponent { delta, component })
        .collect()
}

fn nearest_gap_index(gaps: &[f64], d: f64) -> usize {
    let k = gaps.partition_point(|&g| g < d);
    if k == 0 {
        0
    } else if k == gaps.len() {
        gaps.len() - 1
    } else if (d - gaps[k - 1]).abs() <= (gaps[k] - d).abs() {
        k - 1
    } else {
        k
    }
}

/// Apply the coarse-grained measurement channel entrywise:
/// `Phi_sigma(rho)_ij = exp(-(a_i - a_j)^2 / (8 sigma^2)) rho_ij`.
///
/// The output is a valid state: the damping matrix is a Gaussian Gram
/// kernel, so the Schur product preserves positivity, and the diagonal is
/// untouched, so the trace is preserved exactly.
pub fn apply_channel(rho: &DensityMatrix, channel: &CoarseChannel) -> DensityMatrix {
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let mut out = rho.matrix().clone();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                out[(i, j)] *= Complex64::new(channel.damping(a[i] - a[j]), 0.0);
            }
        }
    }
    DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), out)
}

/// The integral (Kraus) form of the channel, evaluated with Gauss-Hermite
/// quadrature. Slow verification path for [`apply_channel`]; the two agree
/// within 1e-8 whenever the quadrature grid covers the spectrum
/// (`spread / sigma` up to roughly 20 at 64 nodes).
pub fn apply_channel_integral(
    rho: &DensityMatrix,
    channel: &CoarseChannel,
    quadrature_nodes: usize,
) -> DensityMatrix {
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let sigma = channel.sigma();
    let (nodes, weights) = numerics::gauss_hermite(quadrature_nodes);
    // integral f(x) dx = sqrt(2) sigma * sum_m [w_m e^{t_m^2}] f(center + sqrt(2) sigma t_m)
    let coefs: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(t, w)| w * (t * t).exp())
        .collect();
    let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);

    let mut out = rho.matrix().clone();
    for i in 0..dim {
        for j in 0..dim {
            // integral over outcomes x of sqrt(q_i(x) q_j(x))
            let mut factor = 0.0;
            for (t, coef) in nodes.iter().zip(&coefs) {
                let x = center + std::f64::consts::SQRT_2 * sigma * t;
                let e = ((x - a[i]).powi(2) + (x - a[j]).powi(2)) / (4.0 * sigma * sigma);
                factor += coef * norm * (-e).exp();
            }
            factor *= std::f64::consts::SQRT_2 * sigma;
            out[(i, j)] *= Complex64::new(factor, 0.0);
        }
    }
    DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), out)
}

/// The projective (`sigma -> 0`) limit: keep exactly the `delta = 0` mode.
pub fn projective_dephase(rho: &DensityMatrix) -> DensityMatrix {
    let a = rho.spectrum().eigenvalues();
    let dim = rho.dim();
    let mut out = rho.matrix().clone();
    for i in 0..dim {
        for j in 0..dim {
            if (a[i] - a[j]).abs() > GAP_MERGE_TOL {
                out[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), out)
}

/// The disturbance measure `M_sigma(rho) = D(rho, Phi_sigma(rho))`.
///
/// For the relative-entropy variant a support mismatch cannot occur
/// mathematically (the channel output dominates the input), so an infinite
/// outcome is reported as an error rather than a value.
pub fn measure_m(
    rho: &DensityMatrix,
    channel: &CoarseChannel,
    distance: DistanceMeasure,
) -> Result<f64> {
    let damped = apply_channel(rho, channel);
    let d = distance.evaluate(rho.matrix(), damped.matrix())?;
    if d.is_infinite() {
        return Err(Error::SupportViolation);
    }
    Ok(d)
}

/// Fidelity between a pure state and its post-measurement state, through
/// the population double sum
/// `F = sum_{i,j} exp(-(a_i-a_j)^2/(8 sigma^2)) p_i p_j`.
///
/// `O(d^2)` over the nonzero populations; no matrix square root.
pub fn pure_state_fidelity_fast(psi: &PureState, channel: &CoarseChannel) -> f64 {
    let a = psi.spectrum().eigenvalues();
    let probs = psi.probabilities();
    let support: Vec<(f64, f64)> = a
        .iter()
        .zip(&probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&ai, &p)| (ai, p))
        .collect();
    let mut f = 0.0;
    for (k, &(ak, pk)) in support.iter().enumerate() {
        f += pk * pk;
        for &(al, pl) in support.iter().skip(k + 1) {
            f += 2.0 * pk * pl * channel.damping(ak - al);
        }
    }
    f.clamp(0.0, 1.0)
}

/// `M_sigma` for a pure state. The Bures variant uses the fast population
/// sum; the relative-entropy variant goes through the dense path.
pub fn measure_m_pure(
    psi: &PureState,
    channel: &CoarseChannel,
    distance: DistanceMeasure,
) -> Result<f64> {
    match distance {
        DistanceMeasure::Bures => {
            Ok(2.0 - 2.0 * pure_state_fidelity_fast(psi, channel).sqrt())
        }
        DistanceMeasure::RelativeEntropy => {
            measure_m(&psi.density_matrix(), channel, distance)
        }
    }
}

/// A representative family of operations that cannot create macroscopic
/// coherence: each one maps mode components to mode components.
#[derive(Debug, Clone)]
pub enum FreeOperation {
    /// `rho -> U rho U^dagger` with `U = diag(e^{i phi_k})`.
    DiagonalPhaseUnitary(Vec<f64>),
    /// Composition with another coarse-grained measurement.
    ComposeCoarseChannel(CoarseChannel),
    /// Selective projection onto the degenerate sectors of the observable;
    /// the index sets must partition the basis by equal eigenvalue.
    SectorProjection(Vec<Vec<usize>>),
}

impl FreeOperation {
    /// The sector projection determined by a spectrum's degeneracies.
    pub fn sector_projection_for(spectrum: &ObservableSpectrum) -> Self {
        FreeOperation::SectorProjection(spectrum.sector_partition())
    }
}

/// Apply a free operation, returning the selective branches as
/// `(probability, normalized state)` pairs. Deterministic operations
/// return a single branch with probability 1.
pub fn apply_free(rho: &DensityMatrix, op: &FreeOperation) -> Result<Vec<(f64, DensityMatrix)>> {
    let dim = rho.dim();
    match op {
        FreeOperation::DiagonalPhaseUnitary(phases) => {
            if phases.len() != dim {
                return Err(Error::InvalidFreeOperation(format!(
                    "expected {dim} phases, got {}",
                    phases.len()
                )));
            }
            let mut out = rho.matrix().clone();
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] *= Complex64::from_polar(1.0, phases[i] - phases[j]);
                }
            }
            Ok(vec![(
                1.0,
                DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), out),
            )])
        }
        FreeOperation::ComposeCoarseChannel(channel) => {
            Ok(vec![(1.0, apply_channel(rho, channel))])
        }
        FreeOperation::SectorProjection(sectors) => {
            validate_sectors(rho.spectrum(), sectors)?;
            let mut branches = Vec::new();
            for sector in sectors {
                let mut projected = DMatrix::<Complex64>::zeros(dim, dim);
                for &i in sector {
                    for &j in sector {
                        projected[(i, j)] = rho.matrix()[(i, j)];
                    }
                }
                let p = projected.trace().re;
                if p >= BRANCH_PROB_CUTOFF {
                    let normalized = projected * Complex64::new(1.0 / p, 0.0);
                    branches.push((
                        p,
                        DensityMatrix::from_parts_unchecked(rho.spectrum().clone(), normalized),
                    ));
                }
            }
            Ok(branches)
        }
    }
}

fn validate_sectors(spectrum: &ObservableSpectrum, sectors: &[Vec<usize>]) -> Result<()> {
    let dim = spectrum.dim();
    let a = spectrum.eigenvalues();
    let mut seen = vec![false; dim];
    for sector in sectors {
        if sector.is_empty() {
            return Err(Error::InvalidFreeOperation("empty sector".into()));
        }
        for &i in sector {
            if i >= dim {
                return Err(Error::InvalidFreeOperation(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidFreeOperation(format!(
                    "index {i} appears in more than one sector"
                )));
            }
            seen[i] = true;
            if (a[i] - a[sector[0]]).abs() > GAP_MERGE_TOL {
                return Err(Error::InvalidFreeOperation(format!(
                    "sector mixes distinct eigenvalues {} and {}",
                    a[sector[0]],
                    a[i]
                )));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidFreeOperation(format!(
            "index {missing} not covered by any sector"
        )));
    }
    Ok(())
}
