//! Sweep execution: materialize states, evaluate every (state, sigma)
//! point in parallel, validate the bound columns, and assemble CSV
//! documents.
//!
//! Points are independent and may run on any number of threads; rows are
//! sorted by (state label, sigma) before writing so the output never
//! depends on the schedule.

use macrocoh::boson::{self, BosonState, FockSpace, QuadratureGrid};
use macrocoh::coherence::{
    apply_channel, measure_m, CoarseChannel, DensityMatrix, DistanceMeasure, PureState,
};
use macrocoh::decoherence::{decohere, sigma_from_thermal, CouplingParams, ThermalBathParams};
use macrocoh::info;
use macrocoh::random;
use macrocoh::spin::{self, SpinEnsemble};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::output::{format_float, format_optional, CsvDocument};
use crate::specs::{BosonStateSpec, SpecError, SpinStateSpec};

/// Tolerance for the emitted-row invariant `M <= bound + 1e-8`.
const ROW_BOUND_TOL: f64 = 1e-8;

/// Deviation threshold for the decoherence equivalence check.
const DECOHERENCE_TOL: f64 = 1e-10;

/// Errors mapped onto the process exit codes: usage 2, numerical
/// validation 3, convergence 4.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Convergence(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            CliError::Usage(_) => "usage error",
            CliError::Validation(_) => "numerical-validation failure",
            CliError::Convergence(_) => "convergence failure",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<macrocoh::Error> for CliError {
    fn from(e: macrocoh::Error) -> Self {
        use macrocoh::Error::*;
        match e {
            ConvergenceFailure(_) | GridMassDeficit { .. } | InadequateGrid { .. }
            | InsufficientCutoff { .. } => CliError::Convergence(e.to_string()),
            InvalidParameter(_) | NonPositiveSigma(_) | NotNormalized(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// The sigma grid of a sweep. A single point is allowed and evaluates at
/// `min`.
#[derive(Debug, Clone, Copy)]
pub struct SigmaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SigmaGrid {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self, CliError> {
        if !min.is_finite() || min <= 0.0 {
            return Err(CliError::Usage(format!(
                "sigma minimum must be positive (got {min})"
            )));
        }
        if !max.is_finite() || max < min {
            return Err(CliError::Usage(format!(
                "sigma maximum must be >= minimum (got {max} < {min})"
            )));
        }
        if points == 0 {
            return Err(CliError::Usage("sigma grid needs at least one point".into()));
        }
        Ok(Self {
            min,
            max,
            points,
            spacing,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let steps = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let f = k as f64 / steps;
                match self.spacing {
                    Spacing::Log => self.min * (self.max / self.min).powf(f),
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let spacing = match self.spacing {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        };
        format!("{}..{} x{} {spacing}", self.min, self.max, self.points)
    }
}

/// Build the rayon pool honoring `MACROCOH_THREADS` (0 or unset = auto).
pub fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("MACROCOH_THREADS") {
        if let Ok(k) = raw.trim().parse::<usize>() {
            if k > 0 {
                builder = builder.num_threads(k);
            }
        }
    }
    builder.build().expect("failed to build thread pool")
}

fn distance_name(d: DistanceMeasure) -> &'static str {
    match d {
        DistanceMeasure::Bures => "bures",
        DistanceMeasure::RelativeEntropy => "relent",
    }
}

pub const SWEEP_HEADER: &str = "state,sigma,measure,M,I_W,I_F_or_4Var,bound_M_w,bound_M_f";

/// One output row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub state: String,
    pub sigma: f64,
    pub measure: &'static str,
    pub m: f64,
    pub i_w: f64,
    pub i_f_or_4var: f64,
    pub bound_m_w: Option<f64>,
    pub bound_m_f: Option<f64>,
}

impl SweepRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.state,
            format_float(self.sigma),
            self.measure,
            format_float(self.m),
            format_float(self.i_w),
            format_float(self.i_f_or_4var),
            format_optional(self.bound_m_w),
            format_optional(self.bound_m_f),
        )
    }
}

fn validate_rows(rows: &[SweepRow]) -> Result<(), CliError> {
    for row in rows {
        for bound in [row.bound_m_w, row.bound_m_f].into_iter().flatten() {
            if row.m > bound + ROW_BOUND_TOL {
                return Err(CliError::Validation(format!(
                    "state {} at sigma {}: M = {} exceeds its upper bound {}",
                    row.state, row.sigma, row.m, bound
                )));
            }
        }
    }
    Ok(())
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.state
            .cmp(&b.state)
            .then_with(|| a.sigma.total_cmp(&b.sigma))
    });
}

pub struct SpinSweepConfig {
    pub n: usize,
    pub states: Vec<String>,
    pub grid: SigmaGrid,
    pub distance: DistanceMeasure,
    pub seed: u64,
}

enum SpinState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

fn materialize_spin_state(
    ensemble: &SpinEnsemble,
    spec: &SpinStateSpec,
) -> Result<SpinState, CliError> {
    Ok(match spec {
        SpinStateSpec::Ghz => SpinState::Pure(spin::ghz_state(ensemble)),
        SpinStateSpec::Product { theta } => {
            SpinState::Pure(spin::product_state(ensemble, *theta))
        }
        SpinStateSpec::RotatedDicke { k, theta, phi } => {
            SpinState::Pure(spin::rotated_dicke(ensemble, *k, *theta, *phi)?)
        }
        SpinStateSpec::DecoGhz { gamma } => {
            SpinState::Mixed(spin::decohered_ghz(ensemble, *gamma)?)
        }
    })
}

fn spin_row(
    label: &str,
    state: &SpinState,
    sigma: f64,
    distance: DistanceMeasure,
) -> Result<SweepRow, CliError> {
    let channel = CoarseChannel::new(sigma)?;
    let (report, m) = match state {
        SpinState::Pure(psi) => {
            let report = info::bound_report_pure(psi, &channel)?;
            let m = match distance {
                DistanceMeasure::Bures => 2.0 - 2.0 * report.fidelity_sqrt,
                DistanceMeasure::RelativeEntropy => {
                    measure_m(&psi.density_matrix(), &channel, distance)?
                }
            };
            (report, m)
        }
        SpinState::Mixed(rho) => {
            let report = info::bound_report(rho, &channel)?;
            let m = match distance {
                DistanceMeasure::Bures => 2.0 - 2.0 * report.fidelity_sqrt,
                DistanceMeasure::RelativeEntropy => measure_m(rho, &channel, distance)?,
            };
            (report, m)
        }
    };
    // The bound columns cap the Bures measure; they are left empty for the
    // relative-entropy variant, which they do not bound.
    let bures = distance == DistanceMeasure::Bures;
    Ok(SweepRow {
        state: label.to_string(),
        sigma,
        measure: distance_name(distance),
        m,
        i_w: report.i_w,
        i_f_or_4var: report.i_f,
        bound_m_w: bures.then_some(2.0 * (1.0 - report.bound_w)),
        bound_m_f: bures.then_some(2.0 * (1.0 - report.bound_f)),
    })
}

pub fn run_spin_sweep(cfg: &SpinSweepConfig) -> Result<CsvDocument, CliError> {
    let ensemble = SpinEnsemble::new(cfg.n).map_err(CliError::from)?;
    let mut states = Vec::new();
    for token in &cfg.states {
        let spec = crate::specs::parse_spin_spec(token)?;
        states.push((token.trim().to_string(), materialize_spin_state(&ensemble, &spec)?));
    }
    if states.is_empty() {
        return Err(CliError::Usage("no states given".into()));
    }
    let sigmas = cfg.grid.values();
    let points: Vec<(usize, f64)> = (0..states.len())
        .flat_map(|i| sigmas.iter().map(move |&s| (i, s)))
        .collect();
    let mut rows = thread_pool().install(|| {
        points
            .par_iter()
            .map(|&(i, sigma)| spin_row(&states[i].0, &states[i].1, sigma, cfg.distance))
            .collect::<Result<Vec<_>, _>>()
    })?;
    sort_rows(&mut rows);
    validate_rows(&rows)?;
    Ok(CsvDocument {
        comments: vec![format!(
            "macrocoh spin-sweep n={} states={} sigma={} distance={} seed={}",
            cfg.n,
            cfg.states.join(","),
            cfg.grid.describe(),
            distance_name(cfg.distance),
            cfg.seed
        )],
        header: SWEEP_HEADER.to_string(),
        rows: rows.iter().map(SweepRow::to_csv).collect(),
        footers: Vec::new(),
    })
}

pub struct BosonSweepConfig {
    pub states: Vec<String>,
    pub grid: SigmaGrid,
    pub distance: DistanceMeasure,
    pub cutoff: Option<usize>,
    pub grid_points: Option<usize>,
    pub seed: u64,
}

fn materialize_boson_state(
    spec: &BosonStateSpec,
    cutoff: Option<usize>,
) -> Result<BosonState, CliError> {
    let fs = |default: usize| -> Result<FockSpace, CliError> {
        Ok(FockSpace::new(cutoff.unwrap_or(default))?)
    };
    Ok(match spec {
        BosonStateSpec::Coherent { alpha } => {
            let space = fs(FockSpace::required_cutoff(alpha * alpha))?;
            boson::coherent_state(&space, Complex64::new(*alpha, 0.0))?
        }
        BosonStateSpec::Cat { alpha } => {
            let space = fs(FockSpace::required_cutoff(alpha * alpha))?;
            boson::cat_state(&space, *alpha)?
        }
        BosonStateSpec::Fock { n } => {
            let space = fs(n + 1)?;
            boson::fock_state(&space, *n)?
        }
    })
}

fn boson_row(
    label: &str,
    state: &BosonState,
    sigma: f64,
    distance: DistanceMeasure,
    grid_points: Option<usize>,
) -> Result<SweepRow, CliError> {
    let channel = CoarseChannel::new(sigma)?;
    let grid = QuadratureGrid::new(
        boson::required_extent(state, sigma),
        grid_points.unwrap_or(2048),
    )?;
    let m = match distance {
        // The refined-grid check guards every emitted Bures value; the
        // dense relative-entropy path is O(points^3) and runs on the
        // requested grid only.
        DistanceMeasure::Bures => {
            boson::quadrature_measure_m_converged(state, &grid, &channel, distance)?
        }
        DistanceMeasure::RelativeEntropy => {
            boson::quadrature_measure_m(state, &grid, &channel, distance)?
        }
    };
    let var = state.quadrature_variance();
    let bures = distance == DistanceMeasure::Bures;
    Ok(SweepRow {
        state: label.to_string(),
        sigma,
        measure: distance_name(distance),
        m,
        i_w: var,
        i_f_or_4var: 4.0 * var,
        bound_m_w: bures
            .then(|| Ok::<_, CliError>(2.0 * (1.0 - info::bound_w_pure(var, sigma)?)))
            .transpose()?,
        bound_m_f: bures
            .then(|| Ok::<_, CliError>(2.0 * (1.0 - info::bound_f(4.0 * var, sigma)?)))
            .transpose()?,
    })
}

pub fn run_boson_sweep(cfg: &BosonSweepConfig) -> Result<CsvDocument, CliError> {
    let mut states = Vec::new();
    for token in &cfg.states {
        let spec = crate::specs::parse_boson_spec(token)?;
        states.push((
            token.trim().to_string(),
            materialize_boson_state(&spec, cfg.cutoff)?,
        ));
    }
    if states.is_empty() {
        return Err(CliError::Usage("no states given".into()));
    }
    let sigmas = cfg.grid.values();
    let points: Vec<(usize, f64)> = (0..states.len())
        .flat_map(|i| sigmas.iter().map(move |&s| (i, s)))
        .collect();
    let mut rows = thread_pool().install(|| {
        points
            .par_iter()
            .map(|&(i, sigma)| {
                boson_row(&states[i].0, &states[i].1, sigma, cfg.distance, cfg.grid_points)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    sort_rows(&mut rows);
    validate_rows(&rows)?;
    Ok(CsvDocument {
        comments: vec![format!(
            "macrocoh boson-sweep states={} sigma={} distance={} cutoff={} grid_points={} seed={}",
            cfg.states.join(","),
            cfg.grid.describe(),
            distance_name(cfg.distance),
            cfg.cutoff.map(|c| c.to_string()).unwrap_or_else(|| "auto".into()),
            cfg.grid_points
                .map(|c| c.to_string())
                .unwrap_or_else(|| "2048".into()),
            cfg.seed
        )],
        header: SWEEP_HEADER.to_string(),
        rows: rows.iter().map(SweepRow::to_csv).collect(),
        footers: Vec::new(),
    })
}

pub struct BoundsCompareConfig {
    pub n: usize,
    pub gamma: f64,
    pub grid: SigmaGrid,
}

pub const BOUNDS_HEADER: &str = "sigma,fidelity_sqrt,bound_w,bound_f";

pub fn run_bounds_compare(cfg: &BoundsCompareConfig) -> Result<CsvDocument, CliError> {
    if cfg.n < 2 {
        return Err(CliError::Usage(format!(
            "bounds-compare needs n >= 2 (got {})",
            cfg.n
        )));
    }
    if !(0.0..=1.0).contains(&cfg.gamma) {
        return Err(CliError::Usage(format!(
            "gamma must lie in [0, 1] (got {})",
            cfg.gamma
        )));
    }
    let ensemble = SpinEnsemble::new(cfg.n).map_err(CliError::from)?;
    let pure = cfg.gamma == 1.0;
    let ghz = spin::ghz_state(&ensemble);
    let rho = spin::decohered_ghz(&ensemble, cfg.gamma)?;

    let sigmas = cfg.grid.values();
    let reports = thread_pool().install(|| {
        sigmas
            .par_iter()
            .map(|&sigma| {
                let channel = CoarseChannel::new(sigma)?;
                // For the pure state the variance form of the W-bound is
                // the tighter valid choice.
                let report = if pure {
                    info::bound_report_pure(&ghz, &channel)?
                } else {
                    info::bound_report(&rho, &channel)?
                };
                Ok::<_, CliError>(report)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut rows = Vec::with_capacity(reports.len());
    for report in &reports {
        if report.bound_w > report.fidelity_sqrt + ROW_BOUND_TOL
            || report.bound_f > report.fidelity_sqrt + ROW_BOUND_TOL
        {
            return Err(CliError::Validation(format!(
                "bound exceeds sqrt(F) at sigma {}: sqrt(F)={}, B_W={}, B_F={}",
                report.sigma, report.fidelity_sqrt, report.bound_w, report.bound_f
            )));
        }
        rows.push(format!(
            "{},{},{},{}",
            format_float(report.sigma),
            format_float(report.fidelity_sqrt),
            format_float(report.bound_w),
            format_float(report.bound_f),
        ));
    }

    // Locate bound crossings: refine every sign change of B_W - B_F by
    // bisection on the closed forms.
    let difference = |sigma: f64| -> f64 {
        let i_w = reports[0].i_w;
        let i_f = reports[0].i_f;
        let b_w = if pure {
            info::bound_w_pure(i_w, sigma).unwrap()
        } else {
            info::bound_w(i_w, sigma).unwrap()
        };
        b_w - info::bound_f(i_f, sigma).unwrap()
    };
    // A crossing needs a strict sign change; once the bounds agree to
    // machine precision their difference rounds to zero without either
    // ever overtaking the other.
    let mut crossings = Vec::new();
    for pair in sigmas.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (da, db) = (difference(a), difference(b));
        if (da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0) {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (difference(lo) > 0.0) == (difference(mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    let footer = if crossings.is_empty() {
        "crossing_sigma = none".to_string()
    } else {
        format!(
            "crossing_sigma = {}",
            crossings
                .iter()
                .map(|&s| format_float(s))
                .collect::<Vec<_>>()
                .join(",")
        )
    };

    Ok(CsvDocument {
        comments: vec![format!(
            "macrocoh bounds-compare n={} gamma={} sigma={}",
            cfg.n,
            cfg.gamma,
            cfg.grid.describe()
        )],
        header: BOUNDS_HEADER.to_string(),
        rows,
        footers: vec![footer],
    })
}

pub struct DecoherenceCheckConfig {
    pub n: usize,
    pub g: f64,
    pub t: f64,
    pub mu: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct DecoherenceReport {
    pub lines: Vec<String>,
    pub max_deviation: f64,
    pub pass: bool,
}

pub fn run_decoherence_check(cfg: &DecoherenceCheckConfig) -> Result<DecoherenceReport, CliError> {
    let mut lines = Vec::new();
    let mu = match (cfg.mu, cfg.beta, cfg.omega) {
        (Some(mu), None, None) => mu,
        (None, Some(beta), Some(omega)) => {
            // Thermal single-mode bath: the momentum diagonal width is
            // mu = sqrt(tanh(beta omega / 2)).
            let tb = ThermalBathParams::new(beta, omega, cfg.g, cfg.t.max(f64::MIN_POSITIVE))?;
            if cfg.t > 0.0 {
                lines.push(format!(
                    "thermal mapping: sigma = sqrt(tanh(beta*omega/2)/(2 g^2 t^2)) = {}",
                    format_float(sigma_from_thermal(&ThermalBathParams::new(
                        beta, omega, cfg.g, cfg.t
                    )?))
                ));
            }
            tb.coupling().mu()
        }
        _ => {
            return Err(CliError::Usage(
                "give either --mu, or both --beta and --omega".into(),
            ))
        }
    };
    let params = CouplingParams::new(cfg.g, cfg.t, mu)?;
    let ensemble = SpinEnsemble::new(cfg.n).map_err(CliError::from)?;

    let mut states = vec![spin::ghz_state(&ensemble).density_matrix()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..16 {
        states.push(random::random_density_matrix(
            ensemble.magnetization(),
            &mut rng,
        ));
    }

    let max_deviation = match params.effective_sigma() {
        None => {
            lines.push("sigma = inf (t = 0: the channel is the identity)".to_string());
            states
                .iter()
                .map(|rho| {
                    macrocoh::numerics::max_abs_entry(
                        &(decohere(rho, &params).matrix() - rho.matrix()),
                    )
                })
                .fold(0.0f64, f64::max)
        }
        Some(sigma) => {
            lines.push(format!(
                "sigma = mu/(sqrt(2) g t) = {}",
                format_float(sigma)
            ));
            let channel = CoarseChannel::new(sigma)?;
            states
                .iter()
                .map(|rho| {
                    macrocoh::numerics::max_abs_entry(
                        &(decohere(rho, &params).matrix()
                            - apply_channel(rho, &channel).matrix()),
                    )
                })
                .fold(0.0f64, f64::max)
        }
    };
    let pass = max_deviation <= DECOHERENCE_TOL;
    lines.push(format!(
        "max entrywise deviation over {} states (decoherence vs channel): {}",
        states.len(),
        format_float(max_deviation)
    ));
    lines.push(if pass {
        format!("OK (deviation <= {DECOHERENCE_TOL:e})")
    } else {
        format!("FAIL (deviation > {DECOHERENCE_TOL:e})")
    });
    Ok(DecoherenceReport {
        lines,
        max_deviation,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_grid_log_endpoints_exact() {
        let grid = SigmaGrid::new(1.0, 200.0, 60, Spacing::Log).unwrap();
        let values = grid.values();
        assert_eq!(values.len(), 60);
        assert_eq!(values[0], 1.0);
        assert_eq!(values[59], 200.0);
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sigma_grid_single_point() {
        let grid = SigmaGrid::new(1.0, 1.0, 1, Spacing::Log).unwrap();
        assert_eq!(grid.values(), vec![1.0]);
    }

    #[test]
    fn sigma_grid_rejects_bad_ranges() {
        assert!(SigmaGrid::new(0.0, 1.0, 5, Spacing::Log).is_err());
        assert!(SigmaGrid::new(-1.0, 1.0, 5, Spacing::Log).is_err());
        assert!(SigmaGrid::new(2.0, 1.0, 5, Spacing::Log).is_err());
        assert!(SigmaGrid::new(1.0, 2.0, 0, Spacing::Log).is_err());
    }

    #[test]
    fn spin_sweep_single_ghz_row_matches_closed_form() {
        let cfg = SpinSweepConfig {
            n: 256,
            states: vec!["ghz".into()],
            grid: SigmaGrid::new(1.0, 1.0, 1, Spacing::Log).unwrap(),
            distance: DistanceMeasure::Bures,
            seed: 1,
        };
        let doc = run_spin_sweep(&cfg).unwrap();
        assert_eq!(doc.rows.len(), 1);
        let fields: Vec<&str> = doc.rows[0].split(',').collect();
        assert_eq!(fields[0], "ghz");
        let m: f64 = fields[3].parse().unwrap();
        assert!((m - 0.5857864376269049).abs() < 1e-9);
    }

    #[test]
    fn spin_sweep_rejects_bad_spec_with_offending_token() {
        let cfg = SpinSweepConfig {
            n: 8,
            states: vec!["produkt:theta=1".into()],
            grid: SigmaGrid::new(1.0, 2.0, 2, Spacing::Log).unwrap(),
            distance: DistanceMeasure::Bures,
            seed: 1,
        };
        match run_spin_sweep(&cfg) {
            Err(CliError::Usage(message)) => assert!(message.contains("produkt:theta=1")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn product_theta_zero_scores_zero_for_all_sigma() {
        let cfg = SpinSweepConfig {
            n: 32,
            states: vec!["product:theta=0".into()],
            grid: SigmaGrid::new(0.5, 50.0, 7, Spacing::Log).unwrap(),
            distance: DistanceMeasure::Bures,
            seed: 1,
        };
        let doc = run_spin_sweep(&cfg).unwrap();
        for row in &doc.rows {
            let m: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
            assert!(m.abs() < 1e-9, "row {row}");
        }
    }

    #[test]
    fn boson_sweep_coherent_matches_closed_form() {
        let cfg = BosonSweepConfig {
            states: vec!["coherent:alpha=5".into()],
            grid: SigmaGrid::new(1.0, 1.0, 1, Spacing::Log).unwrap(),
            distance: DistanceMeasure::Bures,
            cutoff: None,
            grid_points: None,
            seed: 1,
        };
        let doc = run_boson_sweep(&cfg).unwrap();
        let m: f64 = doc.rows[0].split(',').nth(3).unwrap().parse().unwrap();
        assert!((m - 0.10851678199364837).abs() < 1e-3);
    }

    #[test]
    fn bounds_compare_reports_single_crossing() {
        let cfg = BoundsCompareConfig {
            n: 100,
            gamma: 0.85,
            grid: SigmaGrid::new(5.0, 200.0, 31, Spacing::Log).unwrap(),
        };
        let doc = run_bounds_compare(&cfg).unwrap();
        assert_eq!(doc.rows.len(), 31);
        assert_eq!(doc.footers.len(), 1);
        assert!(doc.footers[0].starts_with("crossing_sigma = "));
        assert!(!doc.footers[0].contains("none"));
        assert!(!doc.footers[0].contains(','), "expected exactly one crossing");
    }

    #[test]
    fn bounds_compare_pure_state_has_no_crossing() {
        let cfg = BoundsCompareConfig {
            n: 64,
            gamma: 1.0,
            grid: SigmaGrid::new(5.0, 200.0, 21, Spacing::Log).unwrap(),
        };
        let doc = run_bounds_compare(&cfg).unwrap();
        assert_eq!(doc.footers[0], "crossing_sigma = none");
        // The variance bound dominates B_F on every row.
        for row in &doc.rows {
            let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
            assert!(fields[2] >= fields[3]);
        }
    }

    #[test]
    fn bounds_compare_gamma_zero_is_trivial() {
        let cfg = BoundsCompareConfig {
            n: 16,
            gamma: 0.0,
            grid: SigmaGrid::new(1.0, 10.0, 5, Spacing::Log).unwrap(),
        };
        let doc = run_bounds_compare(&cfg).unwrap();
        for row in &doc.rows {
            let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
            assert!((fields[1] - 1.0).abs() < 1e-10);
            assert!((fields[2] - 1.0).abs() < 1e-10);
            assert!((fields[3] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn decoherence_check_passes_and_reports_sigma() {
        let report = run_decoherence_check(&DecoherenceCheckConfig {
            n: 8,
            g: 1.0,
            t: 1.0,
            mu: Some(1.0),
            beta: None,
            omega: None,
            seed: 7,
        })
        .unwrap();
        assert!(report.pass);
        assert!(report.max_deviation < 1e-12);
        assert!(report.lines[0].contains("sigma"));
    }

    #[test]
    fn decoherence_check_thermal_mode() {
        let report = run_decoherence_check(&DecoherenceCheckConfig {
            n: 6,
            g: 1.0,
            t: 1.0,
            mu: None,
            beta: Some(2.0),
            omega: Some(1.0),
            seed: 7,
        })
        .unwrap();
        assert!(report.pass);
        assert!(report.lines[0].contains("thermal mapping"));
        assert!(report.lines[0].contains("6.1708757723509"));
    }

    #[test]
    fn decoherence_check_zero_time() {
        let report = run_decoherence_check(&DecoherenceCheckConfig {
            n: 4,
            g: 1.0,
            t: 0.0,
            mu: Some(1.0),
            beta: None,
            omega: None,
            seed: 7,
        })
        .unwrap();
        assert!(report.pass);
        assert_eq!(report.max_deviation, 0.0);
        assert!(report.lines[0].contains("inf"));
    }

    #[test]
    fn decoherence_check_rejects_ambiguous_environment() {
        let err = run_decoherence_check(&DecoherenceCheckConfig {
            n: 4,
            g: 1.0,
            t: 1.0,
            mu: Some(1.0),
            beta: Some(1.0),
            omega: Some(1.0),
            seed: 7,
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
