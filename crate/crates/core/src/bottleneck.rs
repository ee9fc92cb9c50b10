//! The bottleneck homotopy and the post-processing of its endpoints.
//!
//! With `f(x, v) = J_F(x)^T v` and `g(y, w) = J_G(y)^T w`, the homotopy in
//! `(x, y, v, w)` is
//!
//! ```text
//! F(x) = 0
//! G(y) = 0
//! K (γt (x - p0) + (1 - t)(x - y)) - (γt + 1 - t) f(x, v) = 0
//! K (γt (y - p0) + (1 - t)(y - x)) - (γt + 1 - t) g(y, w) = 0
//! ```
//!
//! where `K = I`, or `K = M^T M` for a projection `M`. At `t = 1` its
//! solutions are pairs of normal-locus points; at `t = 0` it is the Lagrange
//! system for critical points of `|x - y|^2`.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{square_system, AlgebraError, Poly, PolySystem, SquaredSystem};
use crate::linalg::{span_residual, CMatrix, CVector};
use crate::rng::{complex_gaussian_vec, unit_circle, SeedTree, Stream};
use crate::startsys::{
    fresh_names, normal_map, same_point, solve_squared_normal_locus, LocusOptions, LocusTolerances,
    NormalLocusResult, StartError,
};
use crate::topology::ComponentLabels;
use crate::tracking::{
    track_all, ConfigError, PathOutcome, PathStatus, PolyHomotopy, TrackerConfig,
};
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BottleneckError {
    #[error("ambient dimensions differ: {0} and {1}")]
    Dimension(usize, usize),
    #[error("symmetric mode needs identical systems for X and Y")]
    NotSymmetric,
    #[error("gamma must have modulus 1, got {0}")]
    Gamma(f64),
    #[error("projection must be m x {n} with 1 <= m <= {n}, got {rows} x {cols}")]
    Projection { n: usize, rows: usize, cols: usize },
    #[error("base point has {found} coordinates, ambient dimension is {expected}")]
    BasePoint { found: usize, expected: usize },
    #[error("squaring {which}: {source}")]
    Square {
        which: &'static str,
        source: AlgebraError,
    },
    #[error("normal locus of {which}: {source}")]
    NormalLocus {
        which: &'static str,
        source: StartError,
    },
    #[error(transparent)]
    Tracker(#[from] ConfigError),
}

/// Settings of a bottleneck run; `None` fields are drawn from the run seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckRunConfig {
    pub gamma: Option<Complex>,
    pub p0: Option<Vec<Complex>>,
    /// `X = Y`: only unordered start pairs are tracked and `(x, y) ~ (y, x)`.
    pub symmetric: bool,
    pub diag_tol: f64,
    pub real_tol: f64,
    pub dedup_tol: f64,
    /// Relative residual bound on the unsquared equations.
    pub filter_tol: f64,
    /// Bound on the least-squares normality residuals.
    pub normality_tol: f64,
    pub projection: Option<DMatrix<f64>>,
    pub tracker: TrackerConfig,
}

impl Default for BottleneckRunConfig {
    fn default() -> Self {
        BottleneckRunConfig {
            gamma: None,
            p0: None,
            symmetric: false,
            diag_tol: 1e-6,
            real_tol: 1e-6,
            dedup_tol: 1e-6,
            filter_tol: 1e-8,
            normality_tol: 1e-8,
            projection: None,
            tracker: TrackerConfig::default(),
        }
    }
}

impl BottleneckRunConfig {
    pub fn locus_tolerances(&self) -> LocusTolerances {
        LocusTolerances {
            filter_tol: self.filter_tol,
            dedup_tol: self.dedup_tol,
        }
    }

    /// `M^T M`, the metric replacing the identity in the normality blocks.
    pub fn metric(&self) -> Option<DMatrix<f64>> {
        self.projection.as_ref().map(|m| m.transpose() * m)
    }
}

/// Checks a projection against ambient dimension `n`.
pub fn check_projection(m: &DMatrix<f64>, n: usize) -> Result<(), BottleneckError> {
    if m.ncols() != n || m.nrows() == 0 || m.nrows() > n {
        return Err(BottleneckError::Projection {
            n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn apply_metric(metric: Option<&DMatrix<f64>>, v: Vec<Poly>) -> Vec<Poly> {
    match metric {
        None => v,
        Some(k) => {
            let nv = v[0].num_vars();
            (0..v.len())
                .map(|r| {
                    (0..v.len()).fold(Poly::zero(nv), |acc, c| {
                        &acc + &v[c].scale(Complex::new(k[(r, c)], 0.0))
                    })
                })
                .collect()
        }
    }
}

/// Main homotopy for `X = {F = 0}`, `Y = {G = 0}` from base point `p0`.
pub fn build_main_homotopy(
    f: &SquaredSystem,
    g: &SquaredSystem,
    p0: &[Complex],
    gamma: Complex,
) -> Result<PolyHomotopy, BottleneckError> {
    build_homotopy(f, g, p0, gamma, None)
}

/// The main homotopy with the normality blocks multiplied by `M^T M`.
pub fn build_projected_homotopy(
    f: &SquaredSystem,
    g: &SquaredSystem,
    p0: &[Complex],
    gamma: Complex,
    m: &DMatrix<f64>,
) -> Result<PolyHomotopy, BottleneckError> {
    check_projection(m, f.ambient_dim())?;
    let k = m.transpose() * m;
    build_homotopy(f, g, p0, gamma, Some(&k))
}

fn build_homotopy(
    f: &SquaredSystem,
    g: &SquaredSystem,
    p0: &[Complex],
    gamma: Complex,
    metric: Option<&DMatrix<f64>>,
) -> Result<PolyHomotopy, BottleneckError> {
    let n = f.ambient_dim();
    if g.ambient_dim() != n {
        return Err(BottleneckError::Dimension(n, g.ambient_dim()));
    }
    if p0.len() != n {
        return Err(BottleneckError::BasePoint {
            found: p0.len(),
            expected: n,
        });
    }
    let (a, b) = (f.codim(), g.codim());
    let total = 2 * n + a + b;
    let (xo, yo, vo, wo) = (0, n, 2 * n, 2 * n + a);
    let var = |i| Poly::var(total, i);
    let cst = |c| Poly::constant(total, c);
    let one = Complex::new(1.0, 0.0);

    let xs: Vec<usize> = (xo..xo + n).collect();
    let ys: Vec<usize> = (yo..yo + n).collect();
    let mut base: Vec<Poly> = Vec::with_capacity(total);
    let mut slope: Vec<Poly> = Vec::with_capacity(total);
    for p in f.squared.polys() {
        base.push(p.embed(total, &xs));
        slope.push(Poly::zero(total));
    }
    for p in g.squared.polys() {
        base.push(p.embed(total, &ys));
        slope.push(Poly::zero(total));
    }
    // base = K (x - y) - f,  slope = γ K (x - p0) - K (x - y) - (γ - 1) f
    let blocks = [
        (xo, yo, normal_map(&f.squared, total, xo, vo)),
        (yo, xo, normal_map(&g.squared, total, yo, wo)),
    ];
    for (me, other, normal) in blocks {
        let diff = apply_metric(
            metric,
            (0..n).map(|j| &var(me + j) - &var(other + j)).collect(),
        );
        let anchor = apply_metric(metric, (0..n).map(|j| &var(me + j) - &cst(p0[j])).collect());
        for j in 0..n {
            base.push(&diff[j] - &normal[j]);
            let s = &(&anchor[j].scale(gamma) - &diff[j]) - &normal[j].scale(gamma - one);
            slope.push(s);
        }
    }

    let mut vars: Vec<String> = f.squared.vars().iter().map(|v| format!("{v}_x")).collect();
    vars.extend(g.squared.vars().iter().map(|v| format!("{v}_y")));
    let taken = vars.clone();
    vars.extend(fresh_names("v", a, &taken));
    let taken = vars.clone();
    vars.extend(fresh_names("w", b, &taken));
    let base = PolySystem::square(vars.clone(), base).expect("square by construction");
    let slope = PolySystem::square(vars, slope).expect("square by construction");
    let label = if metric.is_some() {
        "projected-bottleneck"
    } else {
        "bottleneck"
    };
    Ok(PolyHomotopy::new(label, base, slope))
}

/// Start points `(x, y, v, w)` of the main homotopy.
///
/// Symmetric runs use each unordered pair of distinct points once: the
/// homotopy is invariant under `(x, y, v, w) -> (y, x, w, v)` and the
/// diagonal pairs stay on the non-isolated diagonal.
pub fn assemble_start_points(
    s1: &NormalLocusResult,
    s2: &NormalLocusResult,
    symmetric: bool,
) -> Vec<Vec<Complex>> {
    let join = |p: &crate::startsys::LocusPoint, q: &crate::startsys::LocusPoint| -> Vec<Complex> {
        p.x.iter()
            .chain(&q.x)
            .chain(&p.v)
            .chain(&q.v)
            .copied()
            .collect()
    };
    let mut out = Vec::new();
    for (i, p) in s1.points.iter().enumerate() {
        for (j, q) in s2.points.iter().enumerate() {
            if !symmetric || i < j {
                out.push(join(p, q));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckPair {
    pub x: Vec<Complex>,
    pub y: Vec<Complex>,
    pub v: Vec<Complex>,
    pub w: Vec<Complex>,
    /// `sum (x_i - y_i)^2`.
    pub sq_distance: Complex,
    /// Euclidean distance of the real parts; set for real pairs only.
    pub distance: Option<f64>,
    pub is_real: bool,
    /// Relative residual of the unsquared equations at `x` and `y`.
    pub residual_full: f64,
    /// Worst least-squares residual of the two normality conditions.
    pub normality_residual: f64,
    pub path_index: usize,
    pub path_status: PathStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointCounts {
    pub paths: usize,
    pub pairs: usize,
    pub real_pairs: usize,
    pub diagonal: usize,
    pub divergent: usize,
    pub singular: usize,
    pub truncated: usize,
    pub extraneous: usize,
    /// Off-diagonal endpoints on the variety that fail the normality check.
    pub unverified: usize,
    /// Endpoints equal to an earlier pair.
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub pairs: Vec<BottleneckPair>,
    pub counts: EndpointCounts,
}

fn euclid(z: &[Complex]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `|(x - y)|_2 <= diag_tol (1 + |x|_2)`.
pub fn is_diagonal(x: &[Complex], y: &[Complex], diag_tol: f64) -> bool {
    let d: Vec<Complex> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    euclid(&d) <= diag_tol * (1.0 + euclid(x))
}

/// Least-squares residual of `K (x - y)` against the rows of `J(x)`.
pub fn normality_residual(
    system: &PolySystem,
    x: &[Complex],
    y: &[Complex],
    metric: Option<&DMatrix<f64>>,
) -> f64 {
    let Ok(j) = system.jacobian(x) else {
        return f64::INFINITY;
    };
    let cols: CMatrix = j.transpose();
    let mut r = CVector::from_iterator(x.len(), x.iter().zip(y).map(|(a, b)| a - b));
    if let Some(k) = metric {
        let kc = k.map(|e| Complex::new(e, 0.0));
        r = kc * r;
    }
    span_residual(&cols, &r)
}

/// Lexicographic comparison on `(Re, Im)` of each coordinate, treating
/// parts closer than `tol (1 + |a|_inf)` as equal.
fn lex_less(a: &[Complex], b: &[Complex], tol: f64) -> bool {
    let eps = tol * (1.0 + a.iter().map(|c| c.norm()).fold(0.0, f64::max));
    for (p, q) in a.iter().zip(b) {
        for (u, v) in [(p.re, q.re), (p.im, q.im)] {
            if (u - v).abs() > eps {
                return u < v;
            }
        }
    }
    false
}

/// Sorts tracked endpoints into buckets and verified, deduplicated pairs.
///
/// `fhat` and `ghat` are the original (unsquared) systems. Endpoints whose
/// `x` and `y` agree are diagonal whether the tracker judged them regular or
/// singular: the diagonal is not isolated in the solution set.
pub fn classify_endpoints(
    outcomes: &[PathOutcome],
    fhat: &PolySystem,
    ghat: &PolySystem,
    cfg: &BottleneckRunConfig,
) -> Classification {
    let n = fhat.num_vars();
    let metric = cfg.metric();
    let mut counts = EndpointCounts {
        paths: outcomes.len(),
        ..Default::default()
    };
    let mut pairs: Vec<BottleneckPair> = Vec::new();
    for o in outcomes {
        let (x, y) = (&o.endpoint[..n], &o.endpoint[n..2 * n]);
        match o.status {
            PathStatus::Diverged => {
                counts.divergent += 1;
                continue;
            }
            PathStatus::Truncated => {
                counts.truncated += 1;
                continue;
            }
            PathStatus::Converged | PathStatus::Singular => {}
        }
        if is_diagonal(x, y, cfg.diag_tol) {
            counts.diagonal += 1;
            continue;
        }
        if o.status == PathStatus::Singular {
            counts.singular += 1;
            continue;
        }
        let residual_full = fhat.relative_residual(x).max(ghat.relative_residual(y));
        if residual_full > cfg.filter_tol {
            counts.extraneous += 1;
            continue;
        }
        let normality = normality_residual(fhat, x, y, metric.as_ref()).max(normality_residual(
            ghat,
            y,
            x,
            metric.as_ref(),
        ));
        if normality > cfg.normality_tol {
            counts.unverified += 1;
            continue;
        }
        let rest = &o.endpoint[2 * n..];
        let split = fhat.codim();
        let (mut x, mut y) = (x.to_vec(), y.to_vec());
        let (mut v, mut w) = (rest[..split].to_vec(), rest[split..].to_vec());
        if cfg.symmetric && lex_less(&y, &x, cfg.dedup_tol) {
            std::mem::swap(&mut x, &mut y);
            std::mem::swap(&mut v, &mut w);
        }
        let key: Vec<Complex> = x.iter().chain(&y).copied().collect();
        let swapped: Vec<Complex> = y.iter().chain(&x).copied().collect();
        let dup = pairs.iter().any(|p| {
            let other: Vec<Complex> = p.x.iter().chain(&p.y).copied().collect();
            same_point(&other, &key, cfg.dedup_tol)
                || (cfg.symmetric && same_point(&other, &swapped, cfg.dedup_tol))
        });
        if dup {
            counts.duplicates += 1;
            continue;
        }
        let sq_distance = x.iter().zip(&y).map(|(p, q)| (p - q) * (p - q)).sum();
        pairs.push(BottleneckPair {
            x,
            y,
            v,
            w,
            sq_distance,
            distance: None,
            is_real: false,
            residual_full,
            normality_residual: normality,
            path_index: o.start_index,
            path_status: o.status,
        });
    }
    counts.pairs = pairs.len();
    mark_real(&mut pairs, cfg.real_tol);
    counts.real_pairs = pairs.iter().filter(|p| p.is_real).count();
    Classification { pairs, counts }
}

fn is_real_point(z: &[Complex], tol: f64) -> bool {
    z.iter().all(|c| c.im.abs() <= tol * (1.0 + c.re.abs()))
}

fn mark_real(pairs: &mut [BottleneckPair], tol: f64) {
    for p in pairs {
        p.is_real = is_real_point(&p.x, tol) && is_real_point(&p.y, tol);
        p.distance = p.is_real.then(|| {
            p.x.iter()
                .zip(&p.y)
                .map(|(a, b)| (a.re - b.re).powi(2))
                .sum::<f64>()
                .sqrt()
        });
    }
}

/// The real pairs, with `distance` set.
pub fn filter_real(pairs: &[BottleneckPair], real_tol: f64) -> Vec<BottleneckPair> {
    let mut out = pairs.to_vec();
    mark_real(&mut out, real_tol);
    out.retain(|p| p.is_real);
    out
}

#[derive(Debug, Clone, Copy)]
pub enum DistanceMode<'a> {
    All,
    /// Only pairs whose endpoints lie on different components.
    CrossComponent(&'a ComponentLabels),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MinDistance {
    Found { distance: f64, pair: usize },
    NoRealBottleneck,
}

impl MinDistance {
    pub fn distance(&self) -> Option<f64> {
        match self {
            MinDistance::Found { distance, .. } => Some(*distance),
            MinDistance::NoRealBottleneck => None,
        }
    }
}

/// Smallest distance among the eligible real pairs; `pair` indexes `real_pairs`.
pub fn min_bottleneck_distance(
    real_pairs: &[BottleneckPair],
    mode: DistanceMode<'_>,
) -> MinDistance {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in real_pairs.iter().enumerate() {
        let Some(d) = p.distance else { continue };
        if let DistanceMode::CrossComponent(labels) = mode {
            let re = |z: &[Complex]| z.iter().map(|c| c.re).collect::<Vec<f64>>();
            if labels.label_of(&re(&p.x)) == labels.label_of(&re(&p.y)) {
                continue;
            }
        }
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, i));
        }
    }
    match best {
        Some((distance, pair)) => MinDistance::Found { distance, pair },
        None => MinDistance::NoRealBottleneck,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub square: f64,
    pub normal_locus_x: f64,
    pub normal_locus_y: f64,
    pub track: f64,
    pub classify: f64,
}

/// Everything needed to rerun a bottleneck computation exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveConfig {
    pub seed: u64,
    pub gamma: Complex,
    pub p0: Vec<Complex>,
    pub symmetric: bool,
    pub square_seed_x: u64,
    pub square_seed_y: u64,
    pub locus_seed_x: u64,
    pub locus_seed_y: u64,
    pub diag_tol: f64,
    pub real_tol: f64,
    pub dedup_tol: f64,
    pub filter_tol: f64,
    pub normality_tol: f64,
    pub projection: Option<Vec<Vec<f64>>>,
    pub tracker: TrackerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: EffectiveConfig,
    pub edd_x: usize,
    pub edd_y: usize,
    pub start_paths_x: usize,
    pub start_paths_y: usize,
    pub counts: EndpointCounts,
    /// `EDD(X) EDD(Y)`, or `EDD(X) (EDD(X) - 1) / 2` in symmetric mode.
    pub pair_bound: usize,
    pub pairs: Vec<BottleneckPair>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<StageTimings>,
}

impl RunReport {
    pub fn real_pairs(&self) -> Vec<BottleneckPair> {
        self.pairs.iter().filter(|p| p.is_real).cloned().collect()
    }
}

/// Intermediate results of [`run_bottlenecks`], for callers that need the
/// squared systems or raw path outcomes.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub fx: SquaredSystem,
    pub fy: SquaredSystem,
    pub locus_x: NormalLocusResult,
    pub locus_y: NormalLocusResult,
    pub outcomes: Vec<PathOutcome>,
    pub homotopy: PolyHomotopy,
}

/// Square, solve both normal loci, track the main homotopy, classify.
pub fn run_bottlenecks(
    spec_x: &PolySystem,
    spec_y: &PolySystem,
    cfg: &BottleneckRunConfig,
    seed: u64,
) -> Result<RunReport, BottleneckError> {
    run_bottlenecks_detailed(spec_x, spec_y, cfg, seed).map(|(r, _)| r)
}

pub fn run_bottlenecks_detailed(
    spec_x: &PolySystem,
    spec_y: &PolySystem,
    cfg: &BottleneckRunConfig,
    seed: u64,
) -> Result<(RunReport, RunArtifacts), BottleneckError> {
    cfg.tracker.validate()?;
    let n = spec_x.num_vars();
    if spec_y.num_vars() != n {
        return Err(BottleneckError::Dimension(n, spec_y.num_vars()));
    }
    if cfg.symmetric
        && (spec_x.polys() != spec_y.polys() || spec_x.declared_dim() != spec_y.declared_dim())
    {
        return Err(BottleneckError::NotSymmetric);
    }
    if let Some(m) = &cfg.projection {
        check_projection(m, n)?;
    }
    let tree = SeedTree::new(seed);
    let gamma = cfg
        .gamma
        .unwrap_or_else(|| unit_circle(&mut tree.rng(Stream::Gamma)));
    if (gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(BottleneckError::Gamma(gamma.norm()));
    }
    let p0 = match &cfg.p0 {
        Some(p) if p.len() != n => {
            return Err(BottleneckError::BasePoint {
                found: p.len(),
                expected: n,
            })
        }
        Some(p) => p.clone(),
        None => complex_gaussian_vec(&mut tree.rng(Stream::BasePoint), n),
    };
    let square_seed_x = tree.child(Stream::SquareX);
    let square_seed_y = if cfg.symmetric {
        square_seed_x
    } else {
        tree.child(Stream::SquareY)
    };
    let locus_seed_x = tree.child(Stream::NormalLocusX);
    let locus_seed_y = if cfg.symmetric {
        locus_seed_x
    } else {
        tree.child(Stream::NormalLocusY)
    };
    let mut timings = StageTimings::default();

    let clock = Instant::now();
    let fx = square_system(spec_x, square_seed_x)
        .map_err(|source| BottleneckError::Square { which: "X", source })?;
    let fy = square_system(spec_y, square_seed_y)
        .map_err(|source| BottleneckError::Square { which: "Y", source })?;
    timings.square = clock.elapsed().as_secs_f64();

    let metric = cfg.metric();
    let opts = LocusOptions {
        tolerances: cfg.locus_tolerances(),
        metric: metric.clone(),
        gamma: None,
    };
    let clock = Instant::now();
    let locus_x = solve_squared_normal_locus(&fx, &p0, &cfg.tracker, &opts, locus_seed_x)
        .map_err(|source| BottleneckError::NormalLocus { which: "X", source })?;
    timings.normal_locus_x = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let locus_y = if cfg.symmetric {
        locus_x.clone()
    } else {
        solve_squared_normal_locus(&fy, &p0, &cfg.tracker, &opts, locus_seed_y)
            .map_err(|source| BottleneckError::NormalLocus { which: "Y", source })?
    };
    timings.normal_locus_y = clock.elapsed().as_secs_f64();

    let homotopy = build_homotopy(&fx, &fy, &p0, gamma, metric.as_ref())?;
    let starts = assemble_start_points(&locus_x, &locus_y, cfg.symmetric);
    let clock = Instant::now();
    let outcomes = track_all(&homotopy, &starts, &cfg.tracker);
    timings.track = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let classification = classify_endpoints(&outcomes, spec_x, spec_y, cfg);
    timings.classify = clock.elapsed().as_secs_f64();

    let pair_bound = if cfg.symmetric {
        locus_x.edd * locus_x.edd.saturating_sub(1) / 2
    } else {
        locus_x.edd * locus_y.edd
    };
    let mut warnings: Vec<String> = Vec::new();
    warnings.extend(locus_x.warning.iter().map(|w| format!("X: {w}")));
    if !cfg.symmetric {
        warnings.extend(locus_y.warning.iter().map(|w| format!("Y: {w}")));
    }
    if classification.counts.pairs > pair_bound {
        warnings.push(format!(
            "{} pairs exceed the bound {pair_bound}; deduplication tolerance may be too tight",
            classification.counts.pairs
        ));
    }
    let c = &classification.counts;
    if c.truncated + c.unverified > 0 {
        warnings.push(format!(
            "{} truncated and {} unverified endpoints",
            c.truncated, c.unverified
        ));
    }

    let report = RunReport {
        config: EffectiveConfig {
            seed,
            gamma,
            p0: p0.clone(),
            symmetric: cfg.symmetric,
            square_seed_x,
            square_seed_y,
            locus_seed_x,
            locus_seed_y,
            diag_tol: cfg.diag_tol,
            real_tol: cfg.real_tol,
            dedup_tol: cfg.dedup_tol,
            filter_tol: cfg.filter_tol,
            normality_tol: cfg.normality_tol,
            projection: cfg
                .projection
                .as_ref()
                .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect()),
            tracker: cfg.tracker.clone(),
        },
        edd_x: locus_x.edd,
        edd_y: locus_y.edd,
        start_paths_x: locus_x.paths_followed,
        start_paths_y: locus_y.paths_followed,
        counts: classification.counts,
        pair_bound,
        pairs: classification.pairs,
        warnings,
        timings: Some(timings),
    };
    Ok((
        report,
        RunArtifacts {
            fx,
            fy,
            locus_x,
            locus_y,
            outcomes,
            homotopy,
        },
    ))
}
