use bottleneck_core::algebra::{multihomogeneous_count, square_system, PolySystem, VariableGroups};
use bottleneck_core::baseline::{multihom_for_family, solve_direct};
use bottleneck_core::bottleneck::{
    normality_residual, run_bottlenecks, run_bottlenecks_detailed, BottleneckPair,
    BottleneckRunConfig, RunReport,
};
use bottleneck_core::families::{ellipse, random_conic, random_surface, Family};
use bottleneck_core::startsys::{build_normal_locus_system, solve_normal_locus};
use bottleneck_core::tracking::TrackerConfig;
use bottleneck_core::Complex;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn cfg(symmetric: bool) -> BottleneckRunConfig {
    BottleneckRunConfig {
        symmetric,
        ..Default::default()
    }
}

fn close(a: &[Complex], b: &[Complex], tol: f64) -> bool {
    let s = 1.0 + a.iter().chain(b).map(|c| c.norm()).fold(0.0, f64::max);
    a.iter().zip(b).all(|(p, q)| (p - q).norm() <= tol * s)
}

/// Matches pairs one to one, allowing `(x, y) ~ (y, x)` when `symmetric`.
fn same_sets(a: &[BottleneckPair], b: &[BottleneckPair], symmetric: bool, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|p| {
        let hit = (0..b.len()).find(|&j| {
            !used[j]
                && ((close(&p.x, &b[j].x, tol) && close(&p.y, &b[j].y, tol))
                    || (symmetric && close(&p.x, &b[j].y, tol) && close(&p.y, &b[j].x, tol)))
        });
        hit.map(|j| used[j] = true).is_some()
    })
}

fn swapped(pairs: &[BottleneckPair]) -> Vec<BottleneckPair> {
    pairs
        .iter()
        .map(|p| BottleneckPair {
            x: p.y.clone(),
            y: p.x.clone(),
            v: p.w.clone(),
            w: p.v.clone(),
            ..p.clone()
        })
        .collect()
}

fn quadrics(seed: u64) -> (PolySystem, PolySystem) {
    let inst = Family::QuadricSurfaces.instance(seed);
    (inst.x, inst.y)
}

fn report(x: &PolySystem, y: &PolySystem, symmetric: bool, seed: u64) -> RunReport {
    run_bottlenecks(x, y, &cfg(symmetric), seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn edd_of_surfaces_is_stable(d in 2u32..=3, surface in 0u64..4, seed in any::<u64>()) {
        let x = random_surface(d, surface);
        let r = solve_normal_locus(&x, None, &TrackerConfig::default(), seed).unwrap();
        prop_assert_eq!(r.edd as u32, d * d * d - d * d + d);
    }

    #[test]
    fn normal_locus_points_are_normal(surface in 0u64..8, seed in any::<u64>()) {
        let x = random_surface(2, surface);
        let r = solve_normal_locus(&x, None, &TrackerConfig::default(), seed).unwrap();
        for p in &r.points {
            prop_assert!(normality_residual(&x, &p.x, &r.p0, None) < 1e-8);
        }
        let sq = square_system(&x, 0).unwrap();
        let target = build_normal_locus_system(&sq, &r.p0, None).unwrap();
        let groups = VariableGroups::blocks(&[3, 1]);
        prop_assert_eq!(r.paths_followed as u128, multihomogeneous_count(&target, &groups).unwrap());
    }

    #[test]
    fn swap_symmetry(instance in 0u64..6, seed in any::<u64>()) {
        let (x, y) = quadrics(instance);
        let ab = report(&x, &y, false, seed);
        let ba = report(&y, &x, false, seed);
        prop_assert!(same_sets(&ab.pairs, &swapped(&ba.pairs), false, 1e-6));
    }

    #[test]
    fn seed_robustness(instance in 0u64..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (x, y) = quadrics(instance);
        let (a, b) = (report(&x, &y, false, s1), report(&x, &y, false, s2));
        prop_assert_eq!(&a.counts.pairs, &b.counts.pairs);
        prop_assert!(same_sets(&a.pairs, &b.pairs, false, 1e-6));
    }

    #[test]
    fn pairs_are_normal_and_bounded(instance in 0u64..6, seed in any::<u64>()) {
        let (x, y) = quadrics(instance);
        let r = report(&x, &y, false, seed);
        prop_assert!(r.counts.pairs <= r.edd_x * r.edd_y);
        for p in &r.pairs {
            prop_assert!(normality_residual(&x, &p.x, &p.y, None) < 1e-8);
            prop_assert!(normality_residual(&y, &p.y, &p.x, None) < 1e-8);
        }
    }

    #[test]
    fn rigid_motion_equivariance(theta in 0.0..std::f64::consts::TAU, bx in -2.0..2.0f64, by in -2.0..2.0f64, conic in 0u64..4) {
        let base = if conic == 0 { ellipse() } else { random_conic(conic) };
        let q = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let b = [bx, by];
        // {z : Q z + b in X}; its pairs map back to those of X by z -> Q z + b.
        let moved = base.affine_change(&q, &b);
        let r0 = report(&base, &base, true, 3);
        let r1 = report(&moved, &moved, true, 4);
        let map = |z: &[Complex]| -> Vec<Complex> {
            (0..2).map(|i| z[0] * q[(i, 0)] + z[1] * q[(i, 1)] + b[i]).collect()
        };
        let real = |r: &RunReport| r.pairs.iter().filter(|p| p.is_real).cloned().collect::<Vec<_>>();
        let mapped: Vec<BottleneckPair> = real(&r1)
            .into_iter()
            .map(|p| BottleneckPair { x: map(&p.x), y: map(&p.y), ..p })
            .collect();
        prop_assert!(same_sets(&real(&r0), &mapped, true, 1e-6));
        let mut d0: Vec<f64> = real(&r0).iter().filter_map(|p| p.distance).collect();
        let mut d1: Vec<f64> = mapped.iter().filter_map(|p| p.distance).collect();
        d0.sort_by(f64::total_cmp);
        d1.sort_by(f64::total_cmp);
        prop_assert!(d0.iter().zip(&d1).all(|(a, b)| (a - b).abs() <= 1e-8));
    }

    #[test]
    fn direct_solve_agrees(instance in 0u64..6, seed in any::<u64>()) {
        let (x, y) = quadrics(instance);
        let c = cfg(false);
        let (ours, art) = run_bottlenecks_detailed(&x, &y, &c, seed).unwrap();
        let direct = solve_direct(&art.fx, &art.fy, &c, seed).unwrap();
        prop_assert_eq!(direct.paths, 36);
        prop_assert!(same_sets(&ours.pairs, &direct.pairs, false, 1e-6));
    }
}

#[test]
fn rnc_direct_path_count() {
    for n in 3..=6usize {
        let count = multihom_for_family(Family::RationalNormalCurves(n), 1).unwrap();
        assert_eq!(count, (n * n) as u128 * (1u128 << (2 * n - 2)), "n = {n}");
    }
}
