//! Damped-Newton multistart for balanced configurations, symmetry dedup,
//! continuation in `η`, and `η` sweeps.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equations::{self, InvariantReport, InvariantThresholds};
use crate::massconds::{self, MassConditionId};
use crate::model::{self, MassVector, ModelError, PlanarConfig, ShapeParam};

/// Grid used for canonical keys and the rotation gauge.
pub const CANONICAL_GRID: f64 = 1e-9;
/// Singular values below this fraction of the largest are dropped.
pub const PINV_CUTOFF: f64 = 1e-10;
const DIVERGENCE_FACTOR: f64 = 1e4;
const MAX_BACKTRACKS: usize = 60;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver option: {0}")]
    BadOption(&'static str),
    #[error("continuation must run towards larger eta ({from} -> {to})")]
    BadContinuationRange { from: f64, to: f64 },
    #[error("eta grid must be sorted and inside [0, 1)")]
    BadGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol_residual: f64,
    pub tol_step: f64,
    /// Backtracking factor in `(0, 1)`.
    pub damping: f64,
    pub sample_radius: f64,
    pub dedup_tol: f64,
    pub collision_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n_starts: 2000,
            seed: 0,
            max_iters: 200,
            tol_residual: 1e-12,
            tol_step: 1e-14,
            damping: 0.5,
            sample_radius: 2.0,
            dedup_tol: 1e-6,
            collision_floor: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if self.n_starts < 1 {
            return Err(SolverError::BadOption("n_starts must be at least 1"));
        }
        if self.max_iters < 1 {
            return Err(SolverError::BadOption("max_iters must be at least 1"));
        }
        if !(pos(self.tol_residual) && pos(self.tol_step) && pos(self.dedup_tol) && pos(self.collision_floor)) {
            return Err(SolverError::BadOption("tolerances must be positive"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(SolverError::BadOption("damping must lie in (0, 1)"));
        }
        if !pos(self.sample_radius) {
            return Err(SolverError::BadOption("sample_radius must be positive"));
        }
        Ok(())
    }

    fn thresholds(&self) -> InvariantThresholds {
        InvariantThresholds {
            residual: self.tol_residual,
            ..InvariantThresholds::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    Diverged,
    SingularJacobian,
    CollisionApproach,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub reason: FailureReason,
    pub iterations: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionClass {
    /// Canonical orbit image, unrounded.
    pub canonical: PlanarConfig,
    pub residual_norm: f64,
    pub invariants: InvariantReport,
    pub orbit_size: usize,
    pub hits: usize,
    pub min_rij: f64,
    pub max_rij: f64,
    /// `σ_max / σ_min`, ignoring the rotational null direction when `η = 0`.
    pub jacobian_condition: f64,
}

impl SolutionClass {
    /// Key used to order classes.
    pub fn sort_key(&self, grid: f64) -> Vec<i64> {
        self.canonical
            .to_flat()
            .iter()
            .map(|v| {
                let k = (v / grid).round();
                if k == 0.0 {
                    0
                } else {
                    k as i64
                }
            })
            .collect()
    }
}

struct Converged {
    config: PlanarConfig,
    residual_norm: f64,
    iterations: usize,
}

fn pinv_solve(jac: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax.is_finite() && smax > 0.0) {
        return None;
    }
    svd.solve(rhs, PINV_CUTOFF * smax).ok().filter(|v| v.iter().all(|x| x.is_finite()))
}

fn collides(config: &PlanarConfig, floor: f64) -> bool {
    !(config.min_distance() >= floor)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Newton iteration with backtracking. Converged when the residual is below
/// `tol_residual` and either the next step is below
/// `tol_step · max(1, |q|∞)` or no step can reduce the residual further.
fn newton_core(
    start: &PlanarConfig,
    masses: &MassVector,
    shape: ShapeParam,
    opts: &SolverOptions,
) -> Result<Converged, Failure> {
    let fail = |reason, iterations, residual_norm| Failure { reason, iterations, residual_norm };
    if start.len() != masses.len() {
        return Err(fail(FailureReason::Diverged, 0, f64::NAN));
    }
    if collides(start, opts.collision_floor) {
        return Err(fail(FailureReason::CollisionApproach, 0, f64::NAN));
    }
    let bound = DIVERGENCE_FACTOR * opts.sample_radius.max(1.0) * masses.total().cbrt().max(1.0);
    let mut q = start.to_flat();
    let mut cfg = start.clone();
    let mut f = equations::residual_unchecked(&cfg, masses, shape);
    let mut fnorm = equations::norm(&f);

    for it in 0..opts.max_iters {
        if !fnorm.is_finite() {
            return Err(fail(FailureReason::Diverged, it, fnorm));
        }
        let jac = equations::jacobian_unchecked(&cfg, masses, shape);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let Some(dq) = pinv_solve(&jac, &rhs) else {
            return Err(fail(FailureReason::SingularJacobian, it, fnorm));
        };
        let step = dq.norm();
        if fnorm < opts.tol_residual && step < opts.tol_step * max_abs(&q).max(1.0) {
            return Ok(Converged { config: cfg, residual_norm: fnorm, iterations: it });
        }

        let mut t = 1.0;
        let mut accepted = None;
        let mut blocked_by_collision = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = q.iter().zip(dq.iter()).map(|(a, b)| a + t * b).collect();
            let tcfg = PlanarConfig::from_flat(&trial);
            if collides(&tcfg, opts.collision_floor) {
                blocked_by_collision = true;
            } else {
                let tf = equations::residual_unchecked(&tcfg, masses, shape);
                let tn = equations::norm(&tf);
                if tn < (1.0 - ARMIJO * t) * fnorm {
                    accepted = Some((trial, tcfg, tf, tn));
                    break;
                }
                blocked_by_collision = false;
            }
            t *= opts.damping;
        }
        match accepted {
            Some((nq, ncfg, nf, nn)) => {
                q = nq;
                cfg = ncfg;
                f = nf;
                fnorm = nn;
                if max_abs(&q) > bound {
                    return Err(fail(FailureReason::Diverged, it + 1, fnorm));
                }
            }
            None if fnorm < opts.tol_residual => {
                return Ok(Converged { config: cfg, residual_norm: fnorm, iterations: it });
            }
            None if blocked_by_collision => {
                return Err(fail(FailureReason::CollisionApproach, it, fnorm));
            }
            // a local minimum of |F| with F ≠ 0 forces Jᵀ F = 0
            None => return Err(fail(FailureReason::SingularJacobian, it, fnorm)),
        }
    }
    Err(fail(FailureReason::MaxIters, opts.max_iters, fnorm))
}

fn jacobian_condition(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> f64 {
    let jac = equations::jacobian_unchecked(config, masses, shape);
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    let drop = usize::from(shape.is_central());
    let smin = sv.get(drop).copied().unwrap_or(0.0);
    let smax = sv.last().copied().unwrap_or(0.0);
    if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    }
}

fn build_class(config: &PlanarConfig, residual_norm: f64, masses: &MassVector, shape: ShapeParam) -> Result<SolutionClass, Failure> {
    let mode = shape.symmetry_mode();
    let canonical = model::canonical_image(config, mode, CANONICAL_GRID).image;
    let invariants = InvariantReport::compute(&canonical, masses, shape).map_err(|_| Failure {
        reason: FailureReason::CollisionApproach,
        iterations: 0,
        residual_norm,
    })?;
    let pairs = canonical.pair_distances();
    Ok(SolutionClass {
        residual_norm: invariants.residual_norm,
        orbit_size: model::orbit_size(&canonical, mode, CANONICAL_GRID),
        hits: 1,
        min_rij: pairs.iter().map(|p| p.2).fold(f64::INFINITY, f64::min),
        max_rij: pairs.iter().map(|p| p.2).fold(0.0, f64::max),
        jacobian_condition: jacobian_condition(&canonical, masses, shape),
        invariants,
        canonical,
    })
}

/// Refine `start` to a balanced configuration.
pub fn newton_refine(
    start: &PlanarConfig,
    masses: &MassVector,
    shape: ShapeParam,
    opts: &SolverOptions,
) -> Result<SolutionClass, Failure> {
    let c = newton_core(start, masses, shape, opts)?;
    build_class(&c.config, c.residual_norm, masses, shape)
}

/// Number of Newton iterations used from `start`, for diagnostics.
pub fn newton_iterations(start: &PlanarConfig, masses: &MassVector, shape: ShapeParam, opts: &SolverOptions) -> Result<usize, Failure> {
    newton_core(start, masses, shape, opts).map(|c| c.iterations)
}

/// Start `index` of the stream derived from `seed`.
pub fn sample_start(masses: &MassVector, opts: &SolverOptions, index: u64) -> PlanarConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index);
    let normal = Normal::new(0.0, opts.sample_radius).expect("positive radius");
    let pts = (0..masses.len())
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    PlanarConfig::new(pts).recentered(masses)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub diverged: usize,
    pub singular_jacobian: usize,
    pub collision_approach: usize,
    pub max_iters: usize,
}

impl FailureCounts {
    fn add(&mut self, r: FailureReason) {
        match r {
            FailureReason::Diverged => self.diverged += 1,
            FailureReason::SingularJacobian => self.singular_jacobian += 1,
            FailureReason::CollisionApproach => self.collision_approach += 1,
            FailureReason::MaxIters => self.max_iters += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.diverged + self.singular_jacobian + self.collision_approach + self.max_iters
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartReport {
    pub eta: f64,
    pub n_starts: usize,
    pub converged: usize,
    /// Converged starts whose invariants failed the emission thresholds.
    pub rejected: usize,
    pub failures: FailureCounts,
    pub classes: Vec<SolutionClass>,
}

/// Deduplicated solution classes, sorted by canonical form.
pub fn multistart(masses: &MassVector, shape: ShapeParam, opts: &SolverOptions) -> Result<Vec<SolutionClass>, SolverError> {
    multistart_report(masses, shape, opts).map(|r| r.classes)
}

pub fn multistart_report(masses: &MassVector, shape: ShapeParam, opts: &SolverOptions) -> Result<MultistartReport, SolverError> {
    opts.validate()?;
    let mode = shape.symmetry_mode();
    let thresholds = opts.thresholds();
    let outcomes: Vec<Result<SolutionClass, Failure>> = (0..opts.n_starts as u64)
        .into_par_iter()
        .map(|i| newton_refine(&sample_start(masses, opts, i), masses, shape, opts))
        .collect();

    let mut report = MultistartReport {
        eta: shape.eta(),
        n_starts: opts.n_starts,
        converged: 0,
        rejected: 0,
        failures: FailureCounts::default(),
        classes: Vec::new(),
    };
    for outcome in outcomes {
        let class = match outcome {
            Ok(c) => c,
            Err(f) => {
                report.failures.add(f.reason);
                continue;
            }
        };
        report.converged += 1;
        if !class.invariants.violations(shape, &thresholds).is_empty() {
            report.rejected += 1;
            continue;
        }
        let known = report
            .classes
            .iter_mut()
            .find(|k| model::orbit_distance(&class.canonical, &k.canonical, mode, CANONICAL_GRID) < opts.dedup_tol);
        match known {
            Some(k) => k.hits += 1,
            None => report.classes.push(class),
        }
    }
    report
        .classes
        .sort_by(|a, b| model::compare_keys(&a.sort_key(opts.dedup_tol), &b.sort_key(opts.dedup_tol)));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PathStatus {
    Completed,
    FailedAt { eta: f64, reason: FailureReason },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationPath {
    pub eta_samples: Vec<f64>,
    pub configs: Vec<PlanarConfig>,
    pub status: PathStatus,
}

impl ContinuationPath {
    pub fn last(&self) -> Option<(f64, &PlanarConfig)> {
        self.eta_samples.last().copied().zip(self.configs.last())
    }
}

/// Predictor-corrector continuation of `base` from `eta_from` to `eta_to`.
///
/// The predictor follows the tangent `J dq/dη = −∂F/∂η`; a failed corrector
/// halves the step, at most ten times in a row.
pub fn continue_eta(
    base: &PlanarConfig,
    masses: &MassVector,
    eta_from: f64,
    eta_to: f64,
    steps: usize,
    opts: &SolverOptions,
) -> Result<ContinuationPath, SolverError> {
    opts.validate()?;
    let start_shape = ShapeParam::new(eta_from)?;
    ShapeParam::new(eta_to)?;
    if eta_to < eta_from {
        return Err(SolverError::BadContinuationRange { from: eta_from, to: eta_to });
    }
    if steps < 1 {
        return Err(SolverError::BadOption("steps must be at least 1"));
    }
    base.check_against(masses)?;

    let mut path = ContinuationPath { eta_samples: Vec::new(), configs: Vec::new(), status: PathStatus::Completed };
    let mut cfg = match newton_core(base, masses, start_shape, opts) {
        Ok(c) => c.config,
        Err(f) => {
            path.status = PathStatus::FailedAt { eta: eta_from, reason: f.reason };
            return Ok(path);
        }
    };
    path.eta_samples.push(eta_from);
    path.configs.push(cfg.clone());
    if eta_to == eta_from {
        return Ok(path);
    }

    let nominal = (eta_to - eta_from) / steps as f64;
    let mut eta = eta_from;
    let mut h = nominal;
    let mut halvings = 0;
    while eta < eta_to {
        let target = if eta + h >= eta_to - 1e-15 { eta_to } else { eta + h };
        let dh = target - eta;
        let shape = ShapeParam::new(eta)?;
        let jac = equations::jacobian_unchecked(&cfg, masses, shape);
        let rhs = DVector::from_iterator(
            2 * cfg.len(),
            equations::residual_eta_derivative(&cfg).into_iter().map(|v| -v),
        );
        let Some(tangent) = pinv_solve(&jac, &rhs) else {
            path.status = PathStatus::FailedAt { eta: target, reason: FailureReason::SingularJacobian };
            return Ok(path);
        };
        let predicted: Vec<f64> = cfg.to_flat().iter().zip(tangent.iter()).map(|(q, t)| q + dh * t).collect();
        match newton_core(&PlanarConfig::from_flat(&predicted), masses, ShapeParam::new(target)?, opts) {
            Ok(c) => {
                cfg = c.config;
                eta = target;
                path.eta_samples.push(eta);
                path.configs.push(cfg.clone());
                halvings = 0;
                h = (2.0 * h).min(nominal);
            }
            Err(f) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    path.status = PathStatus::FailedAt { eta: target, reason: f.reason };
                    return Ok(path);
                }
                h = 0.5 * dh;
            }
        }
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: f64,
    pub n_classes: usize,
    pub min_rij: f64,
    pub max_rij: f64,
    /// Minimum over classes of `r12·r34`, `r13·r24`, `r14·r23` (four bodies only).
    pub prod_12_34: Option<f64>,
    pub prod_13_24: Option<f64>,
    pub prod_14_23: Option<f64>,
    pub nearest_condition: Option<MassConditionId>,
    pub nearest_residual: Option<f64>,
    pub converged: usize,
    pub rejected: usize,
    pub failures: FailureCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub masses: Vec<f64>,
    pub seed: u64,
    pub n_starts: usize,
    pub rows: Vec<SweepRow>,
    /// Smallest exceptional-condition root in `(0, 1)`, reported alongside
    /// the counts and not equated with any threshold.
    pub exceptional_eta_first: Option<f64>,
}

fn opposite_products(classes: &[SolutionClass]) -> [Option<f64>; 3] {
    let mut out = [None; 3];
    for c in classes {
        if c.canonical.len() != 4 {
            return [None; 3];
        }
        let d = |i, j| c.canonical.distance(i, j);
        let vals = [d(0, 1) * d(2, 3), d(0, 2) * d(1, 3), d(0, 3) * d(1, 2)];
        for (o, v) in out.iter_mut().zip(vals) {
            *o = Some(o.map_or(v, |x: f64| x.min(v)));
        }
    }
    out
}

/// Run [`multistart`] at each grid point.
pub fn sweep_eta(masses: &MassVector, eta_grid: &[f64], opts: &SolverOptions, include_v3: bool) -> Result<SweepReport, SolverError> {
    opts.validate()?;
    if eta_grid.is_empty()
        || eta_grid.windows(2).any(|w| !(w[0] < w[1]))
        || eta_grid.iter().any(|e| !(0.0..1.0).contains(e))
    {
        return Err(SolverError::BadGrid);
    }
    let four = masses.len() == 4;
    let mut rows = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        let r = multistart_report(masses, ShapeParam::new(eta)?, opts)?;
        let [p1, p2, p3] = if four { opposite_products(&r.classes) } else { [None; 3] };
        let nearest = if four { massconds::nearest_condition(masses, eta, include_v3).ok() } else { None };
        rows.push(SweepRow {
            eta,
            n_classes: r.classes.len(),
            min_rij: r.classes.iter().map(|c| c.min_rij).fold(f64::INFINITY, f64::min),
            max_rij: r.classes.iter().map(|c| c.max_rij).fold(0.0, f64::max),
            prod_12_34: p1,
            prod_13_24: p2,
            prod_14_23: p3,
            nearest_condition: nearest.map(|n| n.0),
            nearest_residual: nearest.map(|n| n.1),
            converged: r.converged,
            rejected: r.rejected,
            failures: r.failures,
        });
    }
    let exceptional_eta_first = if four {
        massconds::scan_exceptional(masses, 0.0, 0.999, 2000, include_v3).ok().and_then(|s| s.eta_first)
    } else {
        None
    };
    Ok(SweepReport {
        masses: masses.as_slice().to_vec(),
        seed: opts.seed,
        n_starts: opts.n_starts,
        rows,
        exceptional_eta_first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_masses, SymmetryGroupMode};
    use proptest::prelude::*;

    fn ones(n: usize) -> MassVector {
        validate_masses(&vec![1.0; n]).unwrap()
    }

    fn lagrange() -> PlanarConfig {
        let rad = 3f64.cbrt() / 3f64.sqrt();
        PlanarConfig::new(
            (0..3)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                    [rad * t.cos(), rad * t.sin()]
                })
                .collect(),
        )
    }

    fn small_opts(n: usize, seed: u64) -> SolverOptions {
        SolverOptions { n_starts: n, seed, ..SolverOptions::default() }
    }

    #[test]
    fn options_validate() {
        assert!(SolverOptions::default().validate().is_ok());
        let bad = SolverOptions { damping: 1.0, ..SolverOptions::default() };
        assert!(bad.validate().is_err());
        let bad = SolverOptions { n_starts: 0, ..SolverOptions::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn perturbed_lagrange_returns() {
        let m = ones(3);
        let exact = lagrange();
        let start = exact.map(|p| p.add_scalar(1e-3));
        let c = newton_refine(&start, &m, ShapeParam::IDENTITY, &SolverOptions::default()).unwrap();
        let want = model::canonical_image(&exact, SymmetryGroupMode::ContinuousRotation, CANONICAL_GRID).image;
        assert!(c.canonical.max_abs_diff(&want) < 1e-10);
        assert!(c.residual_norm < 1e-12);
        assert!(c.jacobian_condition.is_finite());
    }

    #[test]
    fn exact_solution_is_immediate() {
        let its = newton_iterations(&lagrange(), &ones(3), ShapeParam::IDENTITY, &SolverOptions::default()).unwrap();
        assert!(its <= 2);
    }

    #[test]
    fn collision_start() {
        let start = PlanarConfig::new(vec![[0.0, 0.0], [1e-7, 0.0], [1.0, 0.0]]);
        let err = newton_refine(&start, &ones(3), ShapeParam::IDENTITY, &SolverOptions::default()).unwrap_err();
        assert_eq!(err.reason, FailureReason::CollisionApproach);
    }

    #[test]
    fn starts_are_centered_and_reproducible() {
        let m = validate_masses(&[1.0, 2.0, 3.0]).unwrap();
        let o = SolverOptions::default();
        let a = sample_start(&m, &o, 7);
        assert_eq!(a, sample_start(&m, &o, 7));
        assert_ne!(a, sample_start(&m, &o, 8));
        assert!(a.center_of_mass(&m).norm() < 1e-12);
    }

    #[test]
    fn central_census_small() {
        let classes = multistart(&ones(3), ShapeParam::IDENTITY, &small_opts(300, 1)).unwrap();
        assert_eq!(classes.len(), 5);
        let hits: usize = classes.iter().map(|c| c.hits).sum();
        assert!(hits <= 300);
    }

    #[test]
    fn census_is_deterministic() {
        let s = ShapeParam::new(0.1).unwrap();
        let a = multistart(&ones(3), s, &small_opts(200, 3)).unwrap();
        let b = multistart(&ones(3), s, &small_opts(200, 3)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn continuation_scaling_law() {
        let a = 1.25f64.cbrt();
        let base = PlanarConfig::new(vec![[-a, 0.0], [0.0, 0.0], [a, 0.0]]);
        let path = continue_eta(&base, &ones(3), 0.0, 0.3, 10, &SolverOptions::default()).unwrap();
        assert_eq!(path.status, PathStatus::Completed);
        let (eta, last) = path.last().unwrap();
        assert_eq!(eta, 0.3);
        assert!(last.max_abs_diff(&base.scaled(1.3f64.powf(-1.0 / 3.0))) < 1e-8);
        assert!(path.eta_samples.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn continuation_trivial_and_reverse() {
        let a = 1.25f64.cbrt();
        let base = PlanarConfig::new(vec![[-a, 0.0], [0.0, 0.0], [a, 0.0]]);
        let o = SolverOptions::default();
        let p = continue_eta(&base, &ones(3), 0.0, 0.0, 5, &o).unwrap();
        assert_eq!(p.configs.len(), 1);
        assert!(p.configs[0].max_abs_diff(&base) < 1e-14);
        assert!(continue_eta(&base, &ones(3), 0.2, 0.1, 5, &o).is_err());
    }

    #[test]
    fn sweep_rows_for_three_bodies_have_no_products() {
        let r = sweep_eta(&ones(3), &[0.0], &small_opts(300, 2), false).unwrap();
        assert_eq!(r.rows[0].n_classes, 5);
        assert!(r.rows[0].prod_12_34.is_none());
        assert!(r.rows[0].nearest_condition.is_none());
        assert!(sweep_eta(&ones(3), &[0.2, 0.1], &small_opts(10, 2), false).is_err());
    }

    fn arb_config() -> impl Strategy<Value = PlanarConfig> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..=5)
            .prop_map(|v| PlanarConfig::new(v.into_iter().map(|(x, y)| [x, y]).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn group_images_share_a_class_key(c in arb_config()) {
            let mode = SymmetryGroupMode::KleinFour;
            let base = model::canonical_image(&c, mode, CANONICAL_GRID);
            for g in model::GroupElement::KLEIN_FOUR {
                let img = model::canonical_image(&model::apply_symmetry(&c, g), mode, CANONICAL_GRID);
                prop_assert!(model::orbit_distance(&img.image, &base.image, mode, CANONICAL_GRID) < 1e-12);
            }
        }

        #[test]
        fn rotations_share_a_class_key(c in arb_config(), theta in 0.0f64..std::f64::consts::TAU) {
            prop_assume!(c.point(0).norm() > 1e-3);
            let mode = SymmetryGroupMode::ContinuousRotation;
            let a = model::canonical_image(&c, mode, CANONICAL_GRID).image;
            let b = model::canonical_image(&c.rotated(theta), mode, CANONICAL_GRID).image;
            prop_assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(4))]

        #[test]
        fn more_starts_never_lose_classes(seed in 0u64..1000, k in 10usize..40) {
            let m = ones(3);
            let s = ShapeParam::new(0.1).unwrap();
            let few = multistart(&m, s, &small_opts(k, seed)).unwrap();
            let many = multistart(&m, s, &small_opts(2 * k, seed)).unwrap();
            for c in &few {
                prop_assert!(many.iter().any(|d| model::orbit_distance(&c.canonical, &d.canonical, SymmetryGroupMode::KleinFour, CANONICAL_GRID) < 1e-6));
            }
        }
    }
}
