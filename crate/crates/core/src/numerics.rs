//! Dense Hermitian linear-algebra primitives and special functions.
//!
//! Everything here operates on raw `DMatrix<Complex64>` values; the
//! physically meaningful wrappers (density matrices tied to an observable)
//! live in [`crate::coherence`]. Eigendecompositions are backed by
//! nalgebra's self-adjoint solver, with inputs symmetrized first so that
//! accumulated round-off in the anti-Hermitian part cannot leak into the
//! results.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Max entrywise deviation from Hermiticity accepted before rejecting.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues below `-PSD_TOL * max(1, lambda_max)` reject a matrix as
/// non-PSD; negative eigenvalues above that are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues below `SQRT_ZERO_FLOOR * max(1, lambda_max)` are zeroed
/// before a matrix square root. The eigensolver leaves noise of order
/// machine epsilon on rank-deficient inputs, and sqrt amplifies it to
/// ~1e-8, which would dominate quantities built from the entries of the
/// root.
pub const SQRT_ZERO_FLOOR: f64 = 1e-13;

/// Eigenvalue cutoff under which a state is treated as having no support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Result of diagonalizing a Hermitian matrix.
///
/// Eigenvalues are real and sorted ascending; `eigenvectors` holds the
/// corresponding orthonormal eigenvectors as columns, so that
/// `V diag(lambda) V^dagger` reconstructs the input.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Build `V f(diag(lambda)) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let flambda = Complex64::new(f(lambda), 0.0);
            for i in 0..dim {
                scaled[(i, j)] *= flambda;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Reconstruct the original matrix, `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.map_eigenvalues(|x| x)
    }
}

pub fn max_abs_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(m.nrows())
}

/// Diagonalize a Hermitian matrix.
///
/// Rejects inputs whose Hermiticity defect exceeds [`HERMITICITY_TOL`]
/// (scaled by the largest entry for matrices with large norm). The input is
/// symmetrized before factorization, and eigenpairs are returned sorted by
/// ascending eigenvalue.
pub fn eig_hermitian(m: &DMatrix<Complex64>) -> Result<EigenDecomposition> {
    let dim = check_square(m)?;
    let scale = max_abs_entry(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let se = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `(-PSD_TOL * scale, 0)` are clamped to zero before the
/// root, since channel outputs accumulate round-off there; anything more
/// negative rejects the input.
pub fn matrix_sqrt_psd(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = eig_hermitian(m)?;
    let lambda_max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let lambda_min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let threshold = PSD_TOL * lambda_max.max(1.0);
    if lambda_min < -threshold {
        return Err(Error::NotPositiveSemidefinite(lambda_min));
    }
    let floor = SQRT_ZERO_FLOOR * lambda_max.max(1.0);
    Ok(eig.map_eigenvalues(|x| if x < floor { 0.0 } else { x.sqrt() }))
}

fn check_density_pair(rho: &DMatrix<Complex64>, tau: &DMatrix<Complex64>) -> Result<()> {
    let n = check_square(rho)?;
    let m = check_square(tau)?;
    if n != m {
        return Err(Error::DimensionMismatch(n, m));
    }
    for (name, mat) in [("rho", rho), ("tau", tau)] {
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            let _ = name;
            return Err(Error::InvalidTrace(tr.re));
        }
    }
    Ok(())
}

/// Uhlmann fidelity `F(rho, tau) = [Tr sqrt(sqrt(rho) tau sqrt(rho))]^2`.
///
/// Computed as the squared sum of the singular values of
/// `sqrt(rho) * sqrt(tau)`, which is algebraically identical but avoids one
/// nested matrix square root; the equivalence of the two routes is asserted
/// in the test suite. The result is clamped into `[0, 1]`.
pub fn fidelity(rho: &DMatrix<Complex64>, tau: &DMatrix<Complex64>) -> Result<f64> {
    check_density_pair(rho, tau)?;
    let s1 = matrix_sqrt_psd(rho)?;
    let s2 = matrix_sqrt_psd(tau)?;
    let product = s1 * s2;
    let svd = product.svd(false, false);
    let root_f: f64 = svd.singular_values.iter().sum();
    Ok((root_f * root_f).clamp(0.0, 1.0))
}

/// Bures distance `D_B(rho, tau) = 2 - 2 sqrt(F(rho, tau))`, in `[0, 2]`.
pub fn bures_distance(rho: &DMatrix<Complex64>, tau: &DMatrix<Complex64>) -> Result<f64> {
    Ok(2.0 - 2.0 * fidelity(rho, tau)?.sqrt())
}

/// Quantum relative entropy `S(rho || tau) = Tr rho ln rho - Tr rho ln tau`
/// in nats.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in
/// the support of `tau` (eigenvalue cutoff [`SUPPORT_CUTOFF`]); that is a
/// legitimate outcome of the formula, distinct from an `Err`, which signals
/// invalid inputs.
pub fn relative_entropy(rho: &DMatrix<Complex64>, tau: &DMatrix<Complex64>) -> Result<f64> {
    check_density_pair(rho, tau)?;
    let eig_rho = eig_hermitian(rho)?;
    let eig_tau = eig_hermitian(tau)?;

    // Tr rho ln rho, with 0 ln 0 := 0.
    let tr_rho_ln_rho: f64 = eig_rho
        .eigenvalues
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF)
        .map(|&l| l * l.ln())
        .sum();

    // Tr rho ln tau = sum_j ln(mu_j) <v_j| rho |v_j>.
    let overlap = eig_tau.eigenvectors.adjoint() * rho * &eig_tau.eigenvectors;
    let mut tr_rho_ln_tau = 0.0;
    for (j, &mu) in eig_tau.eigenvalues.iter().enumerate() {
        let weight = overlap[(j, j)].re.max(0.0);
        if mu > SUPPORT_CUTOFF {
            tr_rho_ln_tau += weight * mu.ln();
        } else if weight > SUPPORT_CUTOFF {
            return Ok(f64::INFINITY);
        }
    }
    // Klein's inequality guarantees non-negativity; round-off may leave a
    // tiny negative residue.
    Ok((tr_rho_ln_rho - tr_rho_ln_tau).max(0.0))
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Natural log of `n!`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Natural log of the binomial coefficient `C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n, "binomial index out of range");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Orthonormal Hermite polynomials w.r.t. `exp(-t^2) dt`, evaluated at one
/// point: returns `(sum_{k<n} p_k^2, p_n, p_{n-1})`.
fn hermite_orthonormal_scan(n: usize, t: f64) -> (f64, f64, f64) {
    let mut prev = 0.0f64;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum_sq = cur * cur;
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * t * cur
            - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        if k + 1 < n {
            sum_sq += cur * cur;
        }
    }
    (sum_sq, cur, prev)
}

/// Gauss-Hermite nodes and weights for `integral exp(-t^2) f(t) dt`.
///
/// Nodes start from the Golub-Welsch eigenvalues and are polished by
/// Newton steps on the orthonormal Hermite recurrence; weights come from
/// the Christoffel sums `w = 1 / sum_{k<n} p_k(t)^2`, which keeps full
/// relative accuracy even for the exponentially small extreme weights
/// (eigenvector first components do not).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let beta = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = beta;
        jacobi[(k, k - 1)] = beta;
    }
    let se = jacobi.symmetric_eigen();
    let mut nodes: Vec<f64> = se.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut weights = Vec::with_capacity(n);
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (_, p_n, p_prev) = hermite_orthonormal_scan(n, *t);
            let derivative = (2.0 * n as f64).sqrt() * p_prev;
            if derivative != 0.0 {
                *t -= p_n / derivative;
            }
        }
        let (sum_sq, _, _) = hermite_orthonormal_scan(n, *t);
        weights.push(1.0 / sum_sq);
    }
    (nodes, weights)
}

/// Outer product `|psi><psi|`.
pub fn outer_product(psi: &DVector<Complex64>) -> DMatrix<Complex64> {
    psi * psi.adjoint()
}
