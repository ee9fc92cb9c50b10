//! Normal loci: the points `x` of a variety whose normal space contains a
//! base point `p0`, lifted with multipliers `v` so that
//! `F(x) = 0, (x - p0) = J_F(x)^T v`. For general `p0` their number is the
//! Euclidean distance degree, and they are the start points of the
//! bottleneck homotopy.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    multihomogeneous_count, square_system, AlgebraError, Poly, PolySystem, SquaredSystem,
    VariableGroups,
};
use crate::rng::{complex_gaussian_vec, unit_circle, SeedTree, Stream};
use crate::tracking::{track_all, PathStatus, PolyHomotopy, ProductStartSystem, TrackerConfig};
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StartError {
    #[error("base point has {found} coordinates, ambient dimension is {expected}")]
    BasePoint { found: usize, expected: usize },
    #[error("metric must be {0}x{0}")]
    Metric(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Tolerances for turning tracked endpoints into normal-locus points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocusTolerances {
    /// Relative residual on the unsquared equations.
    pub filter_tol: f64,
    /// Relative distance under which two `(x, v)` are the same point.
    pub dedup_tol: f64,
}

impl Default for LocusTolerances {
    fn default() -> Self {
        LocusTolerances {
            filter_tol: 1e-8,
            dedup_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub x: Vec<Complex>,
    pub v: Vec<Complex>,
    /// Residual of the normal-locus system at `(x, v)`.
    pub residual: f64,
}

impl LocusPoint {
    pub fn joined(&self) -> Vec<Complex> {
        self.x.iter().chain(&self.v).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalLocusResult {
    pub points: Vec<LocusPoint>,
    pub edd: usize,
    pub paths_followed: usize,
    pub divergent: usize,
    pub singular: usize,
    pub truncated: usize,
    /// Endpoints that solve the squared system but not the original one.
    pub extraneous: usize,
    pub p0: Vec<Complex>,
    pub gamma: Complex,
    pub seed: u64,
    pub warning: Option<String>,
}

/// Names `prefix1..prefixk`, with underscores prepended until none clash.
pub(crate) fn fresh_names(prefix: &str, k: usize, taken: &[String]) -> Vec<String> {
    let mut p = prefix.to_string();
    loop {
        let names: Vec<String> = (1..=k).map(|i| format!("{p}{i}")).collect();
        if names.iter().all(|n| !taken.contains(n)) {
            return names;
        }
        p.insert(0, '_');
    }
}

/// `f(x, v)_j = sum_i v_i dF_i/dx_j` for `j < n`, in a ring of `num_vars`
/// variables where `x` sits at `x_offset` and `v` at `v_offset`.
pub(crate) fn normal_map(
    f: &PolySystem,
    num_vars: usize,
    x_offset: usize,
    v_offset: usize,
) -> Vec<Poly> {
    let n = f.num_vars();
    let mapping: Vec<usize> = (x_offset..x_offset + n).collect();
    let partials: Vec<Vec<Poly>> = f
        .polys()
        .iter()
        .map(|p| {
            (0..n)
                .map(|j| p.derivative(j).embed(num_vars, &mapping))
                .collect()
        })
        .collect();
    (0..n)
        .map(|j| {
            partials
                .iter()
                .enumerate()
                .fold(Poly::zero(num_vars), |acc, (i, row)| {
                    &acc + &(&row[j] * &Poly::var(num_vars, v_offset + i))
                })
        })
        .collect()
}

/// `K (x - p0)` componentwise, or `x - p0` when no metric is given.
pub(crate) fn metric_times(
    metric: Option<&DMatrix<f64>>,
    num_vars: usize,
    x_offset: usize,
    shift: &[Complex],
    scale_x: Complex,
) -> Vec<Poly> {
    let n = shift.len();
    let diffs: Vec<Poly> = (0..n)
        .map(|j| {
            &Poly::var(num_vars, x_offset + j).scale(scale_x) - &Poly::constant(num_vars, shift[j])
        })
        .collect();
    match metric {
        None => diffs,
        Some(k) => (0..n)
            .map(|r| {
                (0..n).fold(Poly::zero(num_vars), |acc, c| {
                    &acc + &diffs[c].scale(Complex::new(k[(r, c)], 0.0))
                })
            })
            .collect(),
    }
}

/// The square system `F(x) = 0`, `K (x - p0) - J_F(x)^T v = 0` in `(x, v)`.
///
/// `K` is the identity unless a metric (`M^T M` for a projection `M`) is given.
pub fn build_normal_locus_system(
    f: &SquaredSystem,
    p0: &[Complex],
    metric: Option<&DMatrix<f64>>,
) -> Result<PolySystem, StartError> {
    let n = f.ambient_dim();
    let a = f.codim();
    if p0.len() != n {
        return Err(StartError::BasePoint {
            found: p0.len(),
            expected: n,
        });
    }
    if let Some(k) = metric {
        if k.shape() != (n, n) {
            return Err(StartError::Metric(n));
        }
    }
    let total = n + a;
    let sq = &f.squared;
    let mapping: Vec<usize> = (0..n).collect();
    let mut polys: Vec<Poly> = sq
        .polys()
        .iter()
        .map(|p| p.embed(total, &mapping))
        .collect();
    let lhs = metric_times(metric, total, 0, p0, Complex::new(1.0, 0.0));
    let normal = normal_map(sq, total, 0, n);
    polys.extend(lhs.iter().zip(&normal).map(|(l, r)| l - r));
    let mut vars = sq.vars().to_vec();
    vars.extend(fresh_names("v", a, sq.vars()));
    Ok(PolySystem::square(vars, polys)?)
}

/// Options beyond the tracker configuration.
#[derive(Debug, Clone, Default)]
pub struct LocusOptions {
    pub tolerances: LocusTolerances,
    /// Replaces `x - p0` by `K (x - p0)`.
    pub metric: Option<DMatrix<f64>>,
    pub gamma: Option<Complex>,
}

/// Solves the normal locus of `spec` with respect to `p0` (random when `None`).
pub fn solve_normal_locus(
    spec: &PolySystem,
    p0: Option<&[Complex]>,
    cfg: &TrackerConfig,
    seed: u64,
) -> Result<NormalLocusResult, StartError> {
    let tree = SeedTree::new(seed);
    let squared = square_system(spec, tree.child(Stream::SquareX))?;
    let p0 = match p0 {
        Some(p) => p.to_vec(),
        None => complex_gaussian_vec(&mut tree.rng(Stream::BasePoint), spec.num_vars()),
    };
    solve_squared_normal_locus(&squared, &p0, cfg, &LocusOptions::default(), seed)
}

/// Gamma-trick homotopy for the normal locus of `f`, its start points and gamma.
pub fn normal_locus_homotopy(
    f: &SquaredSystem,
    p0: &[Complex],
    opts: &LocusOptions,
    seed: u64,
) -> Result<(PolyHomotopy, Vec<Vec<Complex>>, Complex), StartError> {
    let target = build_normal_locus_system(f, p0, opts.metric.as_ref())?;
    let tree = SeedTree::new(seed);
    let groups = VariableGroups::blocks(&[f.ambient_dim(), f.codim()]);
    let start = ProductStartSystem::random(&target, &groups, &mut tree.rng(Stream::NormalLocusX));
    let gamma = opts
        .gamma
        .unwrap_or_else(|| unit_circle(&mut tree.rng(Stream::Gamma)));
    let homotopy = PolyHomotopy::gamma_trick(
        "normal-locus",
        &target,
        &start.to_system(target.vars()),
        gamma,
    );
    let starts = start.start_points();
    debug_assert_eq!(
        Some(starts.len() as u128),
        multihomogeneous_count(&target, &groups).ok()
    );
    Ok((homotopy, starts, gamma))
}

/// Normal locus of an already squared system.
///
/// Solved by the gamma-trick homotopy from a product start system with
/// variable groups `{x}, {v}`; endpoints are kept when they satisfy the
/// original (unsquared) equations and are distinct.
pub fn solve_squared_normal_locus(
    f: &SquaredSystem,
    p0: &[Complex],
    cfg: &TrackerConfig,
    opts: &LocusOptions,
    seed: u64,
) -> Result<NormalLocusResult, StartError> {
    let (homotopy, starts, gamma) = normal_locus_homotopy(f, p0, opts, seed)?;
    let n = f.ambient_dim();
    let outcomes = track_all(&homotopy, &starts, cfg);

    let mut result = NormalLocusResult {
        points: Vec::new(),
        edd: 0,
        paths_followed: outcomes.len(),
        divergent: 0,
        singular: 0,
        truncated: 0,
        extraneous: 0,
        p0: p0.to_vec(),
        gamma,
        seed,
        warning: None,
    };
    for o in &outcomes {
        match o.status {
            PathStatus::Diverged => result.divergent += 1,
            PathStatus::Singular => result.singular += 1,
            PathStatus::Truncated => result.truncated += 1,
            PathStatus::Converged => {
                let x = &o.endpoint[..n];
                if f.original.relative_residual(x) > opts.tolerances.filter_tol {
                    result.extraneous += 1;
                    continue;
                }
                let dup = result
                    .points
                    .iter()
                    .any(|p| same_point(&p.joined(), &o.endpoint, opts.tolerances.dedup_tol));
                if !dup {
                    result.points.push(LocusPoint {
                        x: x.to_vec(),
                        v: o.endpoint[n..].to_vec(),
                        residual: homotopy.base().residual(&o.endpoint),
                    });
                }
            }
        }
    }
    result.edd = result.points.len();
    if result.edd == 0 {
        result.warning = Some(
            "no finite normal-locus points; the Euclidean distance degree appears to be zero"
                .into(),
        );
    }
    Ok(result)
}

/// `|a - b|_inf <= tol (1 + |a|_inf)`.
pub(crate) fn same_point(a: &[Complex], b: &[Complex], tol: f64) -> bool {
    let scale = 1.0 + a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().zip(b).all(|(p, q)| (p - q).norm() <= tol * scale)
}
