use bottleneck_core::algebra::{
    multihomogeneous_count, numbered_vars, parse_system, square_system, Monomial, Poly, PolySystem,
    VariableGroups,
};
use bottleneck_core::families::twisted_cubic;
use bottleneck_core::Complex;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Complex> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn poly(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, n), coeff()),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let terms = terms.into_iter().map(|(mut e, c)| {
            // Cap the total degree by shaving the largest exponents.
            while e.iter().sum::<u32>() > max_deg {
                let i = (0..e.len()).max_by_key(|&i| e[i]).unwrap();
                e[i] -= 1;
            }
            (Monomial(e), c)
        });
        Poly::from_terms(n, terms)
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec(coeff(), n)
}

fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluate_is_linear(
        (p, q, z) in (1usize..=4).prop_flat_map(|n| (poly(n, 4, 8), poly(n, 4, 8), point(n))),
        alpha in coeff(),
    ) {
        let combo = &p.scale(alpha) + &q;
        let lhs = combo.evaluate(&z);
        let rhs = alpha * p.evaluate(&z) + q.evaluate(&z);
        prop_assert!(rel(lhs, rhs) <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn product_evaluates_to_product(
        (p, q, z) in (1usize..=3).prop_flat_map(|n| (poly(n, 3, 5), poly(n, 3, 5), point(n))),
    ) {
        let lhs = (&p * &q).evaluate(&z);
        let rhs = p.evaluate(&z) * q.evaluate(&z);
        prop_assert!(rel(lhs, rhs) <= 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences(
        (polys, z) in (1usize..=10).prop_flat_map(|n| (prop::collection::vec(poly(n, 5, 6), 1..=n), point(n))),
    ) {
        let n = z.len();
        let sys = PolySystem::new(numbered_vars("x", n), polys.clone(), n - polys.len()).unwrap();
        let j = sys.jacobian(&z).unwrap();
        let h = 1e-5;
        for k in 0..n {
            let (mut zp, mut zm) = (z.clone(), z.clone());
            zp[k] += h;
            zm[k] -= h;
            let (fp, fm) = (sys.evaluate(&zp).unwrap(), sys.evaluate(&zm).unwrap());
            for i in 0..polys.len() {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!(rel(fd, j[(i, k)]) <= 1e-6, "entry ({i},{k}): {fd} vs {}", j[(i, k)]);
            }
        }
    }

    #[test]
    fn parse_print_parse_is_idempotent(
        (polys, n) in (1usize..=4).prop_flat_map(|n| (prop::collection::vec(poly(n, 4, 6), 1..=n), Just(n))),
    ) {
        let sys = PolySystem::new(numbered_vars("x", n), polys.clone(), n - polys.len()).unwrap();
        let text = sys.to_text();
        let once = parse_system(&text).unwrap();
        prop_assert_eq!(once.polys(), sys.polys());
        prop_assert_eq!(once.to_text(), text);
    }

    #[test]
    fn single_group_count_is_bezout(degrees in prop::collection::vec(1u32..=4, 1..=5)) {
        let n = degrees.len();
        let polys: Vec<Poly> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| &Poly::var(n, i).pow(d) - &Poly::constant(n, Complex::new(1.0, 0.0)))
            .collect();
        let sys = PolySystem::square(numbered_vars("x", n), polys).unwrap();
        let count = multihomogeneous_count(&sys, &VariableGroups::single(n)).unwrap();
        prop_assert_eq!(count, degrees.iter().map(|&d| u128::from(d)).product::<u128>());
    }

    #[test]
    fn squared_system_vanishes_on_the_variety(seed in any::<u64>(), t in coeff()) {
        let spec = twisted_cubic();
        let sq = square_system(&spec, seed).unwrap();
        let z = [t, t * t, t * t * t];
        prop_assert!(spec.residual(&z) < 1e-10);
        prop_assert!(sq.squared.residual(&z) < 1e-10);
    }
}
