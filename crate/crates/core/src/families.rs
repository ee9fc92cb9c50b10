//! Generators for the varieties used in examples and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::algebra::{numbered_vars, parse_system, Monomial, Poly, PolySystem};
use crate::rng::{seeded, SeedTree, Stream};
use crate::Complex;

fn xyz() -> Vec<String> {
    vec!["x".into(), "y".into(), "z".into()]
}

fn parse_known(src: &str) -> PolySystem {
    parse_system(src).expect("built-in system parses")
}

/// All exponent vectors of total degree at most `d` in `n` variables.
fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, &mut Vec::new(), &mut out);
    out
}

/// Dense polynomial of degree `d` with independent standard normal real coefficients.
pub fn random_real_poly<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Poly {
    let terms = monomials_up_to(n, d)
        .into_iter()
        .map(|e| (Monomial(e), Complex::new(StandardNormal.sample(rng), 0.0)));
    Poly::from_terms(n, terms)
}

/// A general surface of degree `d` in C^3 (random real coefficients).
pub fn random_surface(d: u32, seed: u64) -> PolySystem {
    let mut rng = SeedTree::new(seed).rng(Stream::Family);
    PolySystem::new(xyz(), vec![random_real_poly(3, d, &mut rng)], 2).expect("valid surface")
}

fn random_affine_form<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Poly {
    let vars: Vec<usize> = (0..n).collect();
    let coeffs: Vec<Complex> = (0..n)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    Poly::linear(
        n,
        &vars,
        &coeffs,
        Complex::new(StandardNormal.sample(rng), 0.0),
    )
}

/// Rational normal curve in C^n: the 2x2 minors of a 2 x n matrix of
/// random affine linear forms.
pub fn rational_normal_curve(n: usize, seed: u64) -> PolySystem {
    assert!(n >= 2);
    let mut rng = SeedTree::new(seed).rng(Stream::Family);
    let rows: Vec<Vec<Poly>> = (0..2)
        .map(|_| (0..n).map(|_| random_affine_form(n, &mut rng)).collect())
        .collect();
    let mut polys = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            polys.push(&(&rows[0][i] * &rows[1][j]) - &(&rows[0][j] * &rows[1][i]));
        }
    }
    PolySystem::new(numbered_vars("x", n), polys, 1).expect("valid curve")
}

/// The twisted cubic `(t, t^2, t^3)` cut out by the three minors of
/// `[[1, x, y], [x, y, z]]`.
pub fn twisted_cubic() -> PolySystem {
    parse_known("vars: x, y, z; dim: 1; y - x^2; z - x*y; x*z - y^2;")
}

/// `x^4+y^4+z^4+(x^2+y^2+z^2)^2-2(x^2+y^2+z^2)-3`.
pub fn goursat() -> PolySystem {
    parse_known("vars: x, y, z; dim: 2;\nx^4+y^4+z^4+(x^2+y^2+z^2)^2-2*(x^2+y^2+z^2)-3;\n")
}

/// `x^2/4 + y^2 = 1`.
pub fn ellipse() -> PolySystem {
    parse_known("vars: x, y; dim: 1; 0.25*x^2 + y^2 - 1;")
}

pub fn unit_circle() -> PolySystem {
    parse_known("vars: x, y; dim: 1; x^2 + y^2 - 1;")
}

/// `(x^2-1)(x^2-4) + y^4 + y^2`: two ovals over `1 <= |x| <= 2`.
pub fn two_ovals() -> PolySystem {
    parse_known("vars: x, y; dim: 1; (x^2-1)*(x^2-4) + y^4 + y^2;")
}

/// The ellipse moved by a random rotation, scaling and shift; a general conic.
pub fn random_conic(seed: u64) -> PolySystem {
    let mut rng = SeedTree::new(seed).rng(Stream::Family);
    let a = nalgebra::DMatrix::from_fn(2, 2, |_, _| StandardNormal.sample(&mut rng));
    let b: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
    ellipse().affine_change(&a, &b)
}

/// Complete-intersection curve in C^n through a random point of a random
/// hyperellipsoid `sum r_i x_i^2 = 1`: the hyperellipsoid plus `n - 2`
/// random real quadrics vanishing at that point.
pub fn complete_intersection_curve(n: usize, seed: u64) -> PolySystem {
    assert!(n >= 2);
    let mut rng = SeedTree::new(seed).rng(Stream::Family);
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let r: Vec<f64> = (0..n).map(|_| unit.sample(&mut rng)).collect();
    let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = dir
        .iter()
        .zip(&r)
        .map(|(d, ri)| ri * d * d)
        .sum::<f64>()
        .sqrt();
    let point: Vec<Complex> = dir.iter().map(|d| Complex::new(d / scale, 0.0)).collect();

    let mut polys = Vec::new();
    let ellipsoid_terms = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 2;
            (Monomial(e), Complex::new(r[i], 0.0))
        })
        .chain(std::iter::once((
            Monomial(vec![0; n]),
            Complex::new(-1.0, 0.0),
        )));
    polys.push(Poly::from_terms(n, ellipsoid_terms));
    for _ in 0..n - 2 {
        let q = random_real_poly(n, 2, &mut rng);
        let shift = q.evaluate(&point);
        polys.push(&q - &Poly::constant(n, shift));
    }
    PolySystem::new(numbered_vars("x", n), polys, 1).expect("valid curve")
}

/// Planar conic `{l1 = 0, l2 = 0, q = 0}` inside a random 2-plane of C^4.
pub fn planar_conic_in_c4(seed: u64) -> PolySystem {
    let mut rng = SeedTree::new(seed).rng(Stream::Family);
    let polys = vec![
        random_affine_form(4, &mut rng),
        random_affine_form(4, &mut rng),
        random_real_poly(4, 2, &mut rng),
    ];
    PolySystem::new(numbered_vars("x", 4), polys, 1).expect("valid curve")
}

/// Cycloheptane conformations with unit bonds and equal bond angles.
///
/// Atoms `p0, p1, p2` are pinned; the unknowns are the coordinates of
/// `p3..p6` (12 variables). Constraints: unit bond lengths
/// `|p_{k+1} - p_k|^2 = 1` for the five free bonds, and equal angles written
/// as `|p_{k+1} - p_{k-1}|^2 = 2 - 2 cos(angle)` at the six free vertices.
/// The result is a curve cut out by 11 quadrics.
pub fn cycloheptane(angle_degrees: f64) -> PolySystem {
    let n = 12;
    let cos = angle_degrees.to_radians().cos();
    let chord2 = 2.0 - 2.0 * cos;
    let sin = angle_degrees.to_radians().sin();
    let fixed = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0 - cos, sin, 0.0]];
    let atom = |k: usize| -> Vec<Poly> {
        if k < 3 {
            fixed[k]
                .iter()
                .map(|&c| Poly::constant(n, Complex::new(c, 0.0)))
                .collect()
        } else {
            (0..3).map(|d| Poly::var(n, 3 * (k - 3) + d)).collect()
        }
    };
    let dist2 = |a: usize, b: usize| -> Poly {
        let (pa, pb) = (atom(a), atom(b));
        pa.iter().zip(&pb).fold(Poly::zero(n), |acc, (u, v)| {
            let d = u - v;
            &acc + &(&d * &d)
        })
    };
    let one = Poly::constant(n, Complex::new(1.0, 0.0));
    let chord = Poly::constant(n, Complex::new(chord2, 0.0));
    let mut polys = Vec::new();
    for (a, b) in [(2, 3), (3, 4), (4, 5), (5, 6), (6, 0)] {
        polys.push(&dist2(a, b) - &one);
    }
    for k in [2usize, 3, 4, 5, 6, 0] {
        let prev = (k + 6) % 7;
        let next = (k + 1) % 7;
        polys.push(&dist2(prev, next) - &chord);
    }
    let vars = (3..7)
        .flat_map(|k| ["x", "y", "z"].map(|c| format!("{c}{k}")))
        .collect();
    PolySystem::new(vars, polys, 1).expect("valid curve")
}

/// Named benchmark families; the varieties are fixed by `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    QuadricSurfaces,
    CubicSurfaces,
    CubicSurface,
    QuarticSurfaces,
    RationalNormalCurves(usize),
    CompleteIntersectionCurve(usize),
    Goursat,
    Ellipse,
    TwoOvals,
    Cycloheptane,
}

pub struct FamilyInstance {
    pub label: String,
    pub x: PolySystem,
    pub y: PolySystem,
    pub symmetric: bool,
}

impl Family {
    pub fn parse(name: &str, n: Option<usize>) -> Option<Family> {
        Some(match name {
            "quadric-surfaces" => Family::QuadricSurfaces,
            "cubic-surfaces" => Family::CubicSurfaces,
            "cubic-surface" => Family::CubicSurface,
            "quartic-surfaces" => Family::QuarticSurfaces,
            "rational-normal-curves" => Family::RationalNormalCurves(n.unwrap_or(3)),
            "ci-curve" => Family::CompleteIntersectionCurve(n.unwrap_or(3)),
            "goursat" => Family::Goursat,
            "ellipse" => Family::Ellipse,
            "two-ovals" => Family::TwoOvals,
            "cycloheptane" => Family::Cycloheptane,
            _ => return None,
        })
    }

    pub fn names() -> &'static [&'static str] {
        &[
            "quadric-surfaces",
            "cubic-surfaces",
            "cubic-surface",
            "quartic-surfaces",
            "rational-normal-curves",
            "ci-curve",
            "goursat",
            "ellipse",
            "two-ovals",
            "cycloheptane",
        ]
    }

    pub fn instance(self, seed: u64) -> FamilyInstance {
        let mut rng = seeded(seed);
        let mut two = |f: &dyn Fn(u64) -> PolySystem| {
            let (a, b): (u64, u64) = (rng.random(), rng.random());
            (f(a), f(b))
        };
        let pair = |label: String, (x, y): (PolySystem, PolySystem)| FamilyInstance {
            label,
            x,
            y,
            symmetric: false,
        };
        let single = |label: &str, x: PolySystem| FamilyInstance {
            label: label.into(),
            y: x.clone(),
            x,
            symmetric: true,
        };
        match self {
            Family::QuadricSurfaces => pair(
                "Two quadratic surfaces in C^3".into(),
                two(&|s| random_surface(2, s)),
            ),
            Family::CubicSurfaces => pair(
                "Two cubic surfaces in C^3".into(),
                two(&|s| random_surface(3, s)),
            ),
            Family::QuarticSurfaces => pair(
                "Two quartic surfaces in C^3".into(),
                two(&|s| random_surface(4, s)),
            ),
            Family::CubicSurface => single("One cubic surface in C^3", random_surface(3, seed)),
            Family::RationalNormalCurves(n) => pair(
                format!("Two rational normal curves in C^{n}"),
                two(&|s| rational_normal_curve(n, s)),
            ),
            Family::CompleteIntersectionCurve(n) => single(
                &format!("Complete intersection curve in C^{n}"),
                complete_intersection_curve(n, seed),
            ),
            Family::Goursat => single("Goursat surface", goursat()),
            Family::Ellipse => single("Ellipse", ellipse()),
            Family::TwoOvals => single("Two-oval quartic", two_ovals()),
            Family::Cycloheptane => single("Cycloheptane", cycloheptane(115.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surfaces_are_dense() {
        let s = random_surface(3, 1);
        assert_eq!(s.polys()[0].terms().len(), 20);
        assert_eq!(s.codim(), 1);
    }

    #[test]
    fn twisted_cubic_vanishes_on_parametrization() {
        let s = twisted_cubic();
        for k in 0..10 {
            let t = Complex::new(0.3 * k as f64 - 1.2, 0.1 * k as f64);
            assert!(s.residual(&[t, t * t, t * t * t]) < 1e-13);
        }
    }

    #[test]
    fn rnc_has_three_minors_in_c3() {
        let s = rational_normal_curve(3, 4);
        assert_eq!(s.polys().len(), 3);
        assert!(s.polys().iter().all(|p| p.degree() == 2));
    }

    #[test]
    fn cycloheptane_shape() {
        let s = cycloheptane(115.0);
        assert_eq!(s.num_vars(), 12);
        assert_eq!(s.polys().len(), 11);
        assert!(s.polys().iter().all(|p| p.degree() == 2));
    }

    #[test]
    fn ci_curve_contains_its_seed_point_structure() {
        let s = complete_intersection_curve(4, 2);
        assert_eq!(s.polys().len(), 3);
        assert_eq!(s.declared_dim(), 1);
    }
}
