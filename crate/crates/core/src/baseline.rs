//! Direct solution of the Lagrange system for `|x - y|^2` by a
//! multihomogeneous homotopy, used as a benchmark and as an independent check
//! of the bottleneck homotopy.
//!
//! Unknowns are `(x, y, v0, v, w0, w)` with
//!
//! ```text
//! F(x) = 0,  G(y) = 0,
//! v0 (x - y) - J_F(x)^T v = 0,  w0 (y - x) - J_G(y)^T w = 0,
//! l(v0, v) = 1,  m(w0, w) = 1,
//! ```
//!
//! `l, m` random affine patches on the projective multiplier spaces and
//! variable groups `{x, y}, {v0, v}, {w0, w}`. With a projection `M` the
//! difference `x - y` is replaced by `M^T M (x - y)`.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    multihomogeneous_count, square_system, Poly, PolySystem, SquaredSystem, VariableGroups,
};
use crate::bottleneck::{
    check_projection, classify_endpoints, BottleneckError, BottleneckPair, BottleneckRunConfig,
    EndpointCounts,
};
use crate::families::Family;
use crate::rng::{complex_gaussian, unit_circle, SeedTree, Stream};
use crate::startsys::{fresh_names, normal_map};
use crate::tracking::{track_all, PathOutcome, PathStatus, PolyHomotopy, ProductStartSystem};
use crate::Complex;

/// Multiplier scale below which a patch coordinate counts as zero.
const AT_INFINITY: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSolution {
    pub x: Vec<Complex>,
    pub y: Vec<Complex>,
    pub v: Vec<Complex>,
    pub w: Vec<Complex>,
    pub residual: f64,
    pub status: PathStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSolveReport {
    /// Number of tracked paths, the multihomogeneous root count.
    pub paths: usize,
    pub multihom_count: u128,
    /// Finite endpoints in affine multiplier coordinates.
    pub solutions: Vec<DirectSolution>,
    pub counts: EndpointCounts,
    pub pairs: Vec<BottleneckPair>,
    pub gamma: Complex,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time: Option<f64>,
}

/// Target system of the direct method and its variable groups.
pub fn build_direct_system(
    f: &SquaredSystem,
    g: &SquaredSystem,
    metric: Option<&DMatrix<f64>>,
    seed: u64,
) -> Result<(PolySystem, VariableGroups), BottleneckError> {
    let n = f.ambient_dim();
    if g.ambient_dim() != n {
        return Err(BottleneckError::Dimension(n, g.ambient_dim()));
    }
    let (a, b) = (f.codim(), g.codim());
    let total = 2 * n + a + b + 2;
    let (xo, yo, v0, vo, w0, wo) = (0, n, 2 * n, 2 * n + 1, 2 * n + 1 + a, 2 * n + 2 + a);
    let var = |i| Poly::var(total, i);
    let xs: Vec<usize> = (xo..xo + n).collect();
    let ys: Vec<usize> = (yo..yo + n).collect();

    let mut polys: Vec<Poly> = f
        .squared
        .polys()
        .iter()
        .map(|p| p.embed(total, &xs))
        .collect();
    polys.extend(g.squared.polys().iter().map(|p| p.embed(total, &ys)));
    let fv = normal_map(&f.squared, total, xo, vo);
    let gw = normal_map(&g.squared, total, yo, wo);
    let diff: Vec<Poly> = (0..n)
        .map(|j| match metric {
            None => &var(xo + j) - &var(yo + j),
            Some(k) => {
                let idx: Vec<usize> = xs.iter().chain(&ys).copied().collect();
                let coeffs: Vec<Complex> = (0..n)
                    .map(|c| Complex::new(k[(j, c)], 0.0))
                    .chain((0..n).map(|c| Complex::new(-k[(j, c)], 0.0)))
                    .collect();
                Poly::linear(total, &idx, &coeffs, Complex::new(0.0, 0.0))
            }
        })
        .collect();
    for j in 0..n {
        polys.push(&(&diff[j] * &var(v0)) - &fv[j]);
    }
    for j in 0..n {
        polys.push(&(&(-&diff[j]) * &var(w0)) - &gw[j]);
    }
    let mut rng = SeedTree::new(seed).rng(Stream::Direct);
    for (lead, len) in [(v0, a + 1), (w0, b + 1)] {
        let idx: Vec<usize> = (lead..lead + len).collect();
        let coeffs: Vec<Complex> = (0..len).map(|_| complex_gaussian(&mut rng)).collect();
        polys.push(Poly::linear(total, &idx, &coeffs, Complex::new(-1.0, 0.0)));
    }

    let mut vars: Vec<String> = f.squared.vars().iter().map(|v| format!("{v}_x")).collect();
    vars.extend(g.squared.vars().iter().map(|v| format!("{v}_y")));
    let taken = vars.clone();
    let mv = fresh_names("v", a + 1, &taken);
    let mw = fresh_names("w", b + 1, &taken);
    vars.extend(mv);
    vars.extend(mw);
    let system = PolySystem::square(vars, polys).expect("square by construction");
    let groups = VariableGroups::new(
        total,
        vec![
            (0..2 * n).collect(),
            (v0..v0 + a + 1).collect(),
            (w0..w0 + b + 1).collect(),
        ],
    )
    .expect("partition by construction");
    Ok((system, groups))
}

/// Gamma-trick homotopy from a multihomogeneous product start system to the
/// direct target, with its start points and gamma.
pub fn direct_homotopy(
    f: &SquaredSystem,
    g: &SquaredSystem,
    cfg: &BottleneckRunConfig,
    seed: u64,
) -> Result<(PolyHomotopy, Vec<Vec<Complex>>, Complex), BottleneckError> {
    let (target, groups) = build_direct_system(f, g, cfg.metric().as_ref(), seed)?;
    let tree = SeedTree::new(seed);
    let start = ProductStartSystem::random(&target, &groups, &mut tree.rng(Stream::Direct));
    let gamma = cfg
        .gamma
        .unwrap_or_else(|| unit_circle(&mut tree.rng(Stream::Gamma)));
    let h = PolyHomotopy::gamma_trick("direct", &target, &start.to_system(target.vars()), gamma);
    let starts = start.start_points();
    debug_assert_eq!(
        Some(starts.len() as u128),
        multihomogeneous_count(&target, &groups).ok()
    );
    Ok((h, starts, gamma))
}

/// Solves the Lagrange system directly and classifies the endpoints exactly
/// as the bottleneck homotopy does.
pub fn solve_direct(
    f: &SquaredSystem,
    g: &SquaredSystem,
    cfg: &BottleneckRunConfig,
    seed: u64,
) -> Result<DirectSolveReport, BottleneckError> {
    cfg.tracker.validate()?;
    let clock = Instant::now();
    let n = f.ambient_dim();
    if let Some(m) = &cfg.projection {
        check_projection(m, n)?;
    }
    let (a, b) = (f.codim(), g.codim());
    let (h, starts, gamma) = direct_homotopy(f, g, cfg, seed)?;
    let multihom_count = starts.len() as u128;
    let outcomes = track_all(&h, &starts, &cfg.tracker);

    // Back to affine multipliers v/v0, w/w0; a vanishing v0 or w0 is a point at infinity.
    let (v0, w0) = (2 * n, 2 * n + 1 + a);
    let mut solutions = Vec::new();
    let affine: Vec<PathOutcome> = outcomes
        .iter()
        .map(|o| {
            let z = &o.endpoint;
            let (sv, sw) = (z[v0], z[w0]);
            let scale = |lead: usize, len: usize| {
                z[lead..lead + len]
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max)
            };
            let infinite = sv.norm() <= AT_INFINITY * scale(v0, a + 1)
                || sw.norm() <= AT_INFINITY * scale(w0, b + 1);
            let mut endpoint: Vec<Complex> = z[..2 * n].to_vec();
            endpoint.extend(z[v0 + 1..v0 + 1 + a].iter().map(|c| c / sv));
            endpoint.extend(z[w0 + 1..w0 + 1 + b].iter().map(|c| c / sw));
            let status = if infinite {
                PathStatus::Diverged
            } else {
                o.status
            };
            if matches!(status, PathStatus::Converged | PathStatus::Singular) {
                solutions.push(DirectSolution {
                    x: endpoint[..n].to_vec(),
                    y: endpoint[n..2 * n].to_vec(),
                    v: endpoint[2 * n..2 * n + a].to_vec(),
                    w: endpoint[2 * n + a..].to_vec(),
                    residual: o.residual,
                    status,
                });
            }
            PathOutcome {
                status,
                endpoint,
                ..o.clone()
            }
        })
        .collect();
    let classification = classify_endpoints(&affine, &f.original, &g.original, cfg);
    Ok(DirectSolveReport {
        paths: outcomes.len(),
        multihom_count,
        solutions,
        counts: classification.counts,
        pairs: classification.pairs,
        gamma,
        seed,
        wall_time: Some(clock.elapsed().as_secs_f64()),
    })
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub example: String,
    /// Start paths for X and Y (one entry when `X = Y`).
    pub start_paths: Vec<usize>,
    pub main_paths: usize,
    pub multihom: u128,
    pub solutions: usize,
    /// Pairs found by the direct method, when it was run.
    pub direct_solutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seconds: Option<(f64, Option<f64>)>,
}

impl BenchRow {
    /// `2·6+36`, `36+210`.
    pub fn edd_column(&self) -> String {
        match self.start_paths.as_slice() {
            [p, q] if p == q => format!("2·{p}+{}", self.main_paths),
            [p, q] => format!("{p}+{q}+{}", self.main_paths),
            [p] => format!("{p}+{}", self.main_paths),
            _ => self.main_paths.to_string(),
        }
    }
}

/// Runs the bottleneck homotopy on a family instance and, if `direct`, the
/// direct method too. The multihomogeneous count is always computed.
pub fn bench_family(
    family: Family,
    cfg: &BottleneckRunConfig,
    seed: u64,
    direct: bool,
) -> Result<BenchRow, BottleneckError> {
    let inst = family.instance(seed);
    let cfg = BottleneckRunConfig {
        symmetric: inst.symmetric,
        ..cfg.clone()
    };
    let clock = Instant::now();
    let (report, art) = crate::bottleneck::run_bottlenecks_detailed(&inst.x, &inst.y, &cfg, seed)?;
    let ours = clock.elapsed().as_secs_f64();
    let (target, groups) = build_direct_system(&art.fx, &art.fy, cfg.metric().as_ref(), seed)?;
    let multihom = multihomogeneous_count(&target, &groups).expect("square target");
    let (direct_solutions, theirs) = if direct {
        let clock = Instant::now();
        let d = solve_direct(&art.fx, &art.fy, &cfg, seed)?;
        (Some(d.counts.pairs), Some(clock.elapsed().as_secs_f64()))
    } else {
        (None, None)
    };
    let start_paths = if inst.symmetric {
        vec![report.start_paths_x]
    } else {
        vec![report.start_paths_x, report.start_paths_y]
    };
    Ok(BenchRow {
        example: inst.label,
        start_paths,
        main_paths: report.counts.paths,
        multihom,
        solutions: report.counts.pairs,
        direct_solutions,
        seconds: Some((ours, theirs)),
    })
}

/// Multihomogeneous count of the direct method for a family, without solving anything.
pub fn multihom_for_family(family: Family, seed: u64) -> Result<u128, BottleneckError> {
    let inst = family.instance(seed);
    let tree = SeedTree::new(seed);
    let sq = |s: &PolySystem, which, stream| {
        square_system(s, tree.child(stream))
            .map_err(|source| BottleneckError::Square { which, source })
    };
    let fx = sq(&inst.x, "X", Stream::SquareX)?;
    let fy = sq(&inst.y, "Y", Stream::SquareY)?;
    let (target, groups) = build_direct_system(&fx, &fy, None, seed)?;
    Ok(multihomogeneous_count(&target, &groups).expect("square target"))
}

/// Markdown table with columns `Example | EDD | multihom | #solutions`.
pub fn bench_markdown(rows: &[BenchRow]) -> String {
    let mut s = String::from("| Example | EDD | multihom | #solutions |\n|---|---|---|---|\n");
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            r.example,
            r.edd_column(),
            r.multihom,
            r.solutions
        ));
    }
    s
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "example",
        "edd",
        "multihom",
        "solutions",
        "direct_solutions",
    ])
    .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.example.clone(),
            r.edd_column(),
            r.multihom.to_string(),
            r.solutions.to_string(),
            r.direct_solutions.map_or(String::new(), |d| d.to_string()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{random_surface, rational_normal_curve};

    fn count(x: &PolySystem, y: &PolySystem) -> u128 {
        let fx = square_system(x, 1).unwrap();
        let fy = square_system(y, 2).unwrap();
        let (t, g) = build_direct_system(&fx, &fy, None, 0).unwrap();
        multihomogeneous_count(&t, &g).unwrap()
    }

    #[test]
    fn surface_counts() {
        assert_eq!(count(&random_surface(2, 1), &random_surface(2, 2)), 36);
        assert_eq!(count(&random_surface(3, 1), &random_surface(3, 2)), 1296);
    }

    #[test]
    fn rnc_count_formula() {
        for n in 3..=5 {
            let expected = (n * n) as u128 * (1u128 << (2 * n - 2));
            assert_eq!(
                count(&rational_normal_curve(n, 1), &rational_normal_curve(n, 2)),
                expected
            );
        }
    }

    #[test]
    fn edd_column_format() {
        let row = BenchRow {
            example: "e".into(),
            start_paths: vec![6, 6],
            main_paths: 36,
            multihom: 36,
            solutions: 24,
            direct_solutions: None,
            seconds: None,
        };
        assert_eq!(row.edd_column(), "2·6+36");
        assert!(bench_markdown(&[row]).contains("| e | 2·6+36 | 36 | 24 |"));
    }
}
