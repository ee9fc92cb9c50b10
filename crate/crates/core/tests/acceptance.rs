//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! required criterion fails. Criterion 7 is informational.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bottleneck_core::algebra::{square_system, PolySystem, VariableGroups};
use bottleneck_core::baseline::{direct_homotopy, solve_direct};
use bottleneck_core::bottleneck::{
    build_main_homotopy, build_projected_homotopy, filter_real, min_bottleneck_distance,
    run_bottlenecks_detailed, BottleneckPair, BottleneckRunConfig, DistanceMode, MinDistance,
    RunArtifacts, RunReport,
};
use bottleneck_core::families::{self, Family};
use bottleneck_core::rng::{complex_gaussian_vec, seeded, unit_circle, SeedTree, Stream};
use bottleneck_core::startsys::{normal_locus_homotopy, LocusOptions};
use bottleneck_core::topology::{rips_components, sample_curve, slice_system, ComponentLabels};
use bottleneck_core::tracking::{
    HomotopyEval, HomotopyProblem, PathStatus, PolyHomotopy, ProductStartSystem, TrackerConfig,
};
use bottleneck_core::Complex;
use nalgebra::DMatrix;

const SEED: u64 = 1;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn cfg(symmetric: bool) -> BottleneckRunConfig {
    BottleneckRunConfig {
        symmetric,
        ..Default::default()
    }
}

fn run(x: &PolySystem, y: &PolySystem, symmetric: bool, seed: u64) -> (RunReport, RunArtifacts) {
    run_bottlenecks_detailed(x, y, &cfg(symmetric), seed).expect("run")
}

fn family_run(f: Family) -> (RunReport, RunArtifacts) {
    let inst = f.instance(SEED);
    run(&inst.x, &inst.y, inst.symmetric, SEED)
}

fn dist(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn scale(a: &[Complex]) -> f64 {
    1.0 + a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn same_pair(p: &BottleneckPair, q: &BottleneckPair, symmetric: bool, tol: f64) -> bool {
    let s = scale(&p.x).max(scale(&p.y));
    let straight = dist(&p.x, &q.x) <= tol * s && dist(&p.y, &q.y) <= tol * s;
    straight || (symmetric && dist(&p.x, &q.y) <= tol * s && dist(&p.y, &q.x) <= tol * s)
}

/// Both lists have the same length and every pair of one matches a distinct pair of the other.
fn same_pair_sets(
    a: &[BottleneckPair],
    b: &[BottleneckPair],
    symmetric: bool,
    tol: f64,
) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("{} vs {} pairs", a.len(), b.len()));
    }
    let mut used = vec![false; b.len()];
    for (i, p) in a.iter().enumerate() {
        let hit = (0..b.len()).find(|&j| !used[j] && same_pair(p, &b[j], symmetric, tol));
        match hit {
            Some(j) => used[j] = true,
            None => return Err(format!("pair {i} has no partner")),
        }
    }
    Ok(())
}

fn real_distances(r: &RunReport) -> Vec<f64> {
    let mut d: Vec<f64> = r
        .pairs
        .iter()
        .filter(|p| p.is_real)
        .filter_map(|p| p.distance)
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

fn criterion_1() -> Verdict {
    let (r, _) = family_run(Family::QuadricSurfaces);
    let c = &r.counts;
    let ok = r.edd_x == 6 && r.edd_y == 6 && c.paths == 36 && c.pairs == 24 && c.diagonal == 12;
    verdict(
        ok,
        format!(
            "EDD {}/{}, {} paths, {} pairs, {} diagonal",
            r.edd_x, r.edd_y, c.paths, c.pairs, c.diagonal
        ),
    )
}

fn criterion_2() -> Verdict {
    let (r, _) = family_run(Family::RationalNormalCurves(3));
    let c = &r.counts;
    let ok = r.start_paths_x == 12 && r.start_paths_y == 12 && c.paths == 49 && c.pairs == 49;
    verdict(
        ok,
        format!(
            "start paths {}/{}, {} paths, {} pairs",
            r.start_paths_x, r.start_paths_y, c.paths, c.pairs
        ),
    )
}

fn criterion_3() -> Verdict {
    let (r, _) = family_run(Family::CubicSurfaces);
    let c = &r.counts;
    let ok = r.edd_x == 21 && r.edd_y == 21 && c.paths == 441 && c.pairs == 396;
    verdict(
        ok,
        format!(
            "EDD {}/{}, {} paths, {} pairs",
            r.edd_x, r.edd_y, c.paths, c.pairs
        ),
    )
}

fn criterion_4() -> Verdict {
    let (r, _) = family_run(Family::Goursat);
    let c = &r.counts;
    let ok = r.start_paths_x == 108 && r.edd_x == 52 && c.paths == 1326 && c.real_pairs == 13;
    verdict(
        ok,
        format!(
            "{} start paths, EDD {}, {} paths, {} real pairs",
            r.start_paths_x, r.edd_x, c.paths, c.real_pairs
        ),
    )
}

fn criterion_5() -> Verdict {
    let e = families::ellipse();
    let (r, _) = run(&e, &e, true, SEED);
    let d = real_distances(&r);
    // The axes: 2 * semi-minor and 2 * semi-major.
    let ok = d.len() == 2 && (d[0] - 2.0).abs() <= 1e-8 && (d[1] - 4.0).abs() <= 1e-8;
    verdict(ok, format!("real distances {d:?}"))
}

fn direct_agrees(
    x: &PolySystem,
    y: &PolySystem,
    symmetric: bool,
    expected_paths: Option<usize>,
) -> Result<String, String> {
    let c = cfg(symmetric);
    let (ours, art) = run_bottlenecks_detailed(x, y, &c, SEED).map_err(|e| e.to_string())?;
    let direct = solve_direct(&art.fx, &art.fy, &c, SEED).map_err(|e| e.to_string())?;
    if let Some(n) = expected_paths {
        if direct.paths != n {
            return Err(format!(
                "direct tracked {} paths, expected {n}",
                direct.paths
            ));
        }
    }
    same_pair_sets(&ours.pairs, &direct.pairs, symmetric, 1e-6)?;
    Ok(format!(
        "{} paths, {} pairs",
        direct.paths,
        direct.pairs.len()
    ))
}

fn criterion_6() -> Verdict {
    let q = Family::QuadricSurfaces.instance(SEED);
    let rnc = Family::RationalNormalCurves(3).instance(SEED);
    let e = families::ellipse();
    let parts = [
        ("quadrics", direct_agrees(&q.x, &q.y, false, Some(36))),
        ("rnc", direct_agrees(&rnc.x, &rnc.y, false, Some(144))),
        ("ellipse", direct_agrees(&e, &e, true, None)),
    ];
    let ok = parts.iter().all(|(_, r)| r.is_ok());
    let detail = parts
        .iter()
        .map(|(name, r)| match r {
            Ok(s) | Err(s) => format!("{name}: {s}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdict(ok, detail)
}

fn criterion_7() -> Verdict {
    let (r22, _) = family_run(Family::QuadricSurfaces);
    let (r23, _) = run(
        &families::random_surface(2, SEED),
        &families::random_surface(3, SEED + 1),
        false,
        SEED,
    );
    let ok = r22.counts.diagonal == 12 && r23.counts.diagonal == 24;
    verdict(
        ok,
        format!(
            "diagonal (2,2): {} of 12, (2,3): {} of 24",
            r22.counts.diagonal, r23.counts.diagonal
        ),
    )
}

/// `{x : A x + b in X}` carries the pairs of `X` back by `x -> A^-1 (x - b)`.
fn rigid_motion_check() -> Result<String, String> {
    let e = families::ellipse();
    let (base, _) = run(&e, &e, true, SEED);
    let th: f64 = 0.7;
    let a = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
    let b = [0.3, -1.2];
    let moved = e.affine_change(&a, &b);
    let (r, _) = run(&moved, &moved, true, SEED + 5);
    let map = |p: &[Complex]| -> Vec<Complex> {
        (0..2)
            .map(|i| {
                Complex::new(a[(i, 0)], 0.0) * p[0]
                    + Complex::new(a[(i, 1)], 0.0) * p[1]
                    + Complex::new(b[i], 0.0)
            })
            .collect()
    };
    let mapped: Vec<BottleneckPair> = r
        .pairs
        .iter()
        .map(|p| BottleneckPair {
            x: map(&p.x),
            y: map(&p.y),
            ..p.clone()
        })
        .collect();
    same_pair_sets(&base.pairs, &mapped, true, 1e-8)?;
    let (d0, d1) = (real_distances(&base), real_distances(&r));
    if d0.len() != d1.len() || d0.iter().zip(&d1).any(|(p, q)| (p - q).abs() > 1e-8) {
        return Err(format!("distances {d0:?} vs {d1:?}"));
    }
    Ok(format!("{} pairs carried over", base.pairs.len()))
}

fn criterion_8() -> Verdict {
    let inst = Family::QuadricSurfaces.instance(SEED);
    let (base, _) = run(&inst.x, &inst.y, false, SEED);
    let mut notes = Vec::new();
    let mut ok = true;
    for seed in [11, 12, 13] {
        let (r, _) = run(&inst.x, &inst.y, false, seed);
        let counts_match =
            r.counts.pairs == base.counts.pairs && r.counts.real_pairs == base.counts.real_pairs;
        match same_pair_sets(&base.pairs, &r.pairs, false, 1e-6) {
            Ok(()) if counts_match => notes.push(format!("seed {seed}: {} pairs", r.counts.pairs)),
            Ok(()) => {
                ok = false;
                notes.push(format!("seed {seed}: counts differ"));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("seed {seed}: {e}"));
            }
        }
    }
    match rigid_motion_check() {
        Ok(s) => notes.push(format!("rigid motion: {s}")),
        Err(e) => {
            ok = false;
            notes.push(format!("rigid motion: {e}"));
        }
    }
    verdict(ok, notes.join("; "))
}

fn criterion_9() -> Verdict {
    let c = families::two_ovals();
    let (r, _) = run(&c, &c, true, SEED);
    let real = filter_real(&r.pairs, 1e-6);
    let cloud = sample_curve(
        &c,
        &[(-2.5, 2.5), (-2.5, 2.5)],
        0.05,
        &TrackerConfig::default(),
        SEED,
    )
    .expect("sample");
    let labels = ComponentLabels::from_cloud(&cloud.points, 0.4).expect("labels");
    let (count, _) = rips_components(&cloud.points, 0.4).expect("rips");
    let all = min_bottleneck_distance(&real, DistanceMode::All);
    let cross = min_bottleneck_distance(&real, DistanceMode::CrossComponent(&labels));
    let near = |m: &MinDistance, want: f64| matches!(m, MinDistance::Found { distance, .. } if (distance - want).abs() <= 1e-6);
    // Normal feet on y = 0 sit at x = +-1, +-2: the ovals are 1 thick and 2 apart.
    let ok = near(&all, 1.0) && near(&cross, 2.0) && count == 2;
    verdict(
        ok,
        format!(
            "min {all:?}, cross-component {cross:?}, {count} components from {} points",
            cloud.points.len()
        ),
    )
}

fn criterion_10() -> Verdict {
    use bottleneck_core::baseline::multihom_for_family;
    let counts: Vec<(usize, u128)> = (7..=8)
        .map(|n| {
            (
                n,
                multihom_for_family(Family::RationalNormalCurves(n), SEED).unwrap_or(0),
            )
        })
        .collect();
    let table = [(7, 200_704u128), (8, 1_048_576)];
    let cyclo = Family::Cycloheptane.instance(SEED);
    let ok = counts.iter().zip(table).all(|(a, b)| *a == b) && cyclo.x.num_vars() == 12;
    verdict(
        ok,
        format!("excluded from the suite; optional commands expose RNC multihom counts {counts:?} and cycloheptane"),
    )
}

/// Central differences in every coordinate direction and in `t`.
fn jacobian_error(h: &dyn HomotopyProblem, z: &[Complex], t: f64) -> f64 {
    let n = h.dim();
    let mut e = HomotopyEval::zeros(n);
    h.evaluate(z, t, &mut e);
    let step = 1e-6;
    let size =
        e.jz.iter()
            .chain(e.jt.iter())
            .map(|c| c.norm())
            .fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
        zp[k] += step;
        zm[k] -= step;
        let fd = (h.value(&zp, t) - h.value(&zm, t)) / Complex::new(2.0 * step, 0.0);
        for i in 0..n {
            worst = worst.max((fd[i] - e.jz[(i, k)]).norm() / size);
        }
    }
    let fd = (h.value(z, t + step) - h.value(z, t - step)) / Complex::new(2.0 * step, 0.0);
    for i in 0..n {
        worst = worst.max((fd[i] - e.jt[i]).norm() / size);
    }
    worst
}

fn built_in_homotopies() -> Vec<PolyHomotopy> {
    let tree = SeedTree::new(SEED);
    let mut rng = seeded(99);
    let q = Family::QuadricSurfaces.instance(SEED);
    let fx = square_system(&q.x, tree.child(Stream::SquareX)).unwrap();
    let fy = square_system(&q.y, tree.child(Stream::SquareY)).unwrap();
    let p0 = complex_gaussian_vec(&mut rng, 3);
    let gamma = unit_circle(&mut rng);
    let mut out = vec![
        normal_locus_homotopy(&fx, &p0, &LocusOptions::default(), SEED)
            .unwrap()
            .0,
        build_main_homotopy(&fx, &fy, &p0, gamma).unwrap(),
        direct_homotopy(&fx, &fy, &cfg(false), SEED).unwrap().0,
    ];
    let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, -0.2, 0.1, -0.7, 1.3]);
    out.push(build_projected_homotopy(&fx, &fy, &p0, gamma, &m).unwrap());
    let opts = LocusOptions {
        metric: Some(m.transpose() * &m),
        ..Default::default()
    };
    out.push(normal_locus_homotopy(&fx, &p0, &opts, SEED).unwrap().0);
    let curve = square_system(&families::two_ovals(), tree.child(Stream::SquareX)).unwrap();
    let slice = slice_system(&curve.squared, 0, 1.5);
    let start = ProductStartSystem::random(&slice, &VariableGroups::single(2), &mut rng);
    out.push(PolyHomotopy::gamma_trick(
        "slice",
        &slice,
        &start.to_system(slice.vars()),
        gamma,
    ));
    out
}

fn criterion_11() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut rng = seeded(7);
    let mut worst_fd: f64 = 0.0;
    for h in built_in_homotopies() {
        for t in [0.0, 0.37, 0.91] {
            let z = complex_gaussian_vec(&mut rng, h.dim());
            worst_fd = worst_fd.max(jacobian_error(&h, &z, t));
        }
    }
    ok &= worst_fd <= 1e-6;
    notes.push(format!("worst Jacobian mismatch {worst_fd:.1e}"));

    let e = families::ellipse();
    let rnc = Family::RationalNormalCurves(3).instance(SEED);
    let runs = [
        family_run(Family::QuadricSurfaces),
        family_run(Family::CubicSurfaces),
        family_run(Family::Goursat),
        run(&rnc.x, &rnc.y, false, SEED),
        run(&e, &e, true, SEED),
    ];
    let mut worst_res: f64 = 0.0;
    let mut worst_normal: f64 = 0.0;
    for (r, art) in &runs {
        for o in art
            .outcomes
            .iter()
            .filter(|o| o.status == PathStatus::Converged)
        {
            worst_res = worst_res.max(o.relative_residual);
        }
        for p in &r.pairs {
            worst_normal = worst_normal.max(p.normality_residual);
        }
    }
    ok &= worst_res <= 1e-12 && worst_normal <= 1e-8;
    notes.push(format!(
        "worst converged residual {worst_res:.1e}, worst normality {worst_normal:.1e}"
    ));
    verdict(ok, notes.join("; "))
}

/// Id, check, time limit, and whether failure fails the suite.
type Criterion = (u32, fn() -> Verdict, Duration, bool);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, criterion_1, Duration::from_secs(60), true),
        (2, criterion_2, Duration::from_secs(60), true),
        (3, criterion_3, Duration::from_secs(900), true),
        (4, criterion_4, Duration::from_secs(900), true),
        (5, criterion_5, Duration::from_secs(900), true),
        (6, criterion_6, Duration::from_secs(900), true),
        (7, criterion_7, Duration::from_secs(900), false),
        (8, criterion_8, Duration::from_secs(900), true),
        (9, criterion_9, Duration::from_secs(900), true),
        (10, criterion_10, Duration::from_secs(900), true),
        (11, criterion_11, Duration::from_secs(900), true),
    ];
    let mut failed = 0;
    for (id, f, limit, required) in criteria {
        let clock = Instant::now();
        let v = f();
        let elapsed = clock.elapsed();
        let ok = v.ok && elapsed <= limit;
        let tag = match (ok, required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (logged)",
        };
        println!(
            "criterion {id}: {tag} [{:.1}s] {}",
            elapsed.as_secs_f64(),
            v.detail
        );
        if !ok && required {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
