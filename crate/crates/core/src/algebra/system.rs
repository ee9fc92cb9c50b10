use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use thiserror::Error;

use super::poly::{Poly, PolyDisplay, PowerTable};
use crate::rng::complex_gaussian;
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("system has no variables")]
    NoVariables,
    #[error("polynomial {index} has {found} variables, system has {expected}")]
    VariableCount {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("declared dimension {dim} must be below the ambient dimension {ambient}")]
    BadDimension { dim: usize, ambient: usize },
    #[error("non-finite coefficient in polynomial {0}")]
    NonFinite(usize),
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("{found} equations cannot cut out codimension {codim}")]
    Underdetermined { found: usize, codim: usize },
    #[error("system is not square ({polys} polynomials, {vars} variables)")]
    NotSquare { polys: usize, vars: usize },
    #[error("variable groups do not partition the variables")]
    BadGroups,
}

/// A list of polynomials over named variables, with the dimension of the
/// variety they are meant to define.
#[derive(Clone)]
pub struct PolySystem {
    vars: Vec<String>,
    polys: Vec<Poly>,
    declared_dim: usize,
    compiled: OnceLock<Arc<CompiledSystem>>,
}

impl fmt::Debug for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolySystem")
            .field("vars", &self.vars)
            .field("declared_dim", &self.declared_dim)
            .field("polys", &self.polys)
            .finish()
    }
}

impl PartialEq for PolySystem {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && self.polys == other.polys
            && self.declared_dim == other.declared_dim
    }
}

impl PolySystem {
    pub fn new(
        vars: Vec<String>,
        polys: Vec<Poly>,
        declared_dim: usize,
    ) -> Result<Self, AlgebraError> {
        let n = vars.len();
        if n == 0 {
            return Err(AlgebraError::NoVariables);
        }
        if declared_dim >= n {
            return Err(AlgebraError::BadDimension {
                dim: declared_dim,
                ambient: n,
            });
        }
        for (i, p) in polys.iter().enumerate() {
            if p.num_vars() != n {
                return Err(AlgebraError::VariableCount {
                    index: i,
                    found: p.num_vars(),
                    expected: n,
                });
            }
            if p.terms()
                .iter()
                .any(|t| !t.coeff.re.is_finite() || !t.coeff.im.is_finite())
            {
                return Err(AlgebraError::NonFinite(i));
            }
        }
        Ok(PolySystem {
            vars,
            polys,
            declared_dim,
            compiled: OnceLock::new(),
        })
    }

    /// A zero-dimensional (square) system with generated variable names.
    pub fn square(vars: Vec<String>, polys: Vec<Poly>) -> Result<Self, AlgebraError> {
        if polys.len() != vars.len() {
            return Err(AlgebraError::NotSquare {
                polys: polys.len(),
                vars: vars.len(),
            });
        }
        Self::new(vars, polys, 0)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn declared_dim(&self) -> usize {
        self.declared_dim
    }

    pub fn codim(&self) -> usize {
        self.vars.len() - self.declared_dim
    }

    /// Cached evaluator holding the symbolic Jacobian.
    pub fn compiled(&self) -> &CompiledSystem {
        self.compiled
            .get_or_init(|| Arc::new(CompiledSystem::new(&self.polys, self.vars.len())))
    }

    fn check_point(&self, point: &[Complex]) -> Result<(), AlgebraError> {
        if point.len() != self.num_vars() {
            return Err(AlgebraError::DimensionMismatch {
                found: point.len(),
                expected: self.num_vars(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[Complex]) -> Result<Vec<Complex>, AlgebraError> {
        self.check_point(point)?;
        Ok(self.compiled().values(point))
    }

    /// Jacobian `(i, j) = d S_i / d x_j` at `point`.
    pub fn jacobian(&self, point: &[Complex]) -> Result<DMatrix<Complex>, AlgebraError> {
        self.check_point(point)?;
        let c = self.compiled();
        let mut jac = DMatrix::zeros(self.polys.len(), self.num_vars());
        let mut vals = DVector::zeros(self.polys.len());
        c.eval_into(point, &mut vals, &mut jac);
        Ok(jac)
    }

    /// Largest relative residual `|p_i(x)| / bound_i(x)` over the polynomials.
    ///
    /// The bound is the sum of term magnitudes at `max(1, |x|_inf)`, so the
    /// test is insensitive to how the equations happen to be scaled.
    pub fn relative_residual(&self, point: &[Complex]) -> f64 {
        let radius = point.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.polys
            .iter()
            .map(|p| p.evaluate(point).norm() / p.magnitude_bound(radius).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Largest absolute residual over the polynomials.
    pub fn residual(&self, point: &[Complex]) -> f64 {
        self.polys
            .iter()
            .map(|p| p.evaluate(point).norm())
            .fold(0.0, f64::max)
    }

    /// Canonical text form, parseable by [`crate::algebra::parse_system`].
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "vars: {};\ndim: {};\n",
            self.vars.join(", "),
            self.declared_dim
        );
        for p in &self.polys {
            s.push_str(&format!(
                "{};\n",
                PolyDisplay {
                    poly: p,
                    names: &self.vars
                }
            ));
        }
        s
    }

    /// Substitutes `x -> A x + b` in every polynomial.
    pub fn affine_change(&self, a: &DMatrix<f64>, b: &[f64]) -> PolySystem {
        let n = self.num_vars();
        assert_eq!(a.shape(), (n, n));
        assert_eq!(b.len(), n);
        let images: Vec<Poly> = (0..n)
            .map(|i| {
                let vars: Vec<usize> = (0..n).collect();
                let coeffs: Vec<Complex> = (0..n).map(|j| Complex::new(a[(i, j)], 0.0)).collect();
                Poly::linear(n, &vars, &coeffs, Complex::new(b[i], 0.0))
            })
            .collect();
        let polys = self.polys.iter().map(|p| p.compose(&images)).collect();
        PolySystem::new(self.vars.clone(), polys, self.declared_dim).expect("same shape as input")
    }
}

/// Flattened polynomial for repeated evaluation.
#[derive(Debug, Clone)]
struct CompiledPoly {
    coeffs: Vec<Complex>,
    // (variable, exponent) factors of term k live in factors[offsets[k]..offsets[k+1]]
    factors: Vec<(u32, u32)>,
    offsets: Vec<usize>,
}

impl CompiledPoly {
    fn new(p: &Poly) -> Self {
        let mut coeffs = Vec::with_capacity(p.terms().len());
        let mut factors = Vec::new();
        let mut offsets = vec![0];
        for t in p.terms() {
            coeffs.push(t.coeff);
            for (v, &e) in t.exps.0.iter().enumerate() {
                if e > 0 {
                    factors.push((v as u32, e));
                }
            }
            offsets.push(factors.len());
        }
        CompiledPoly {
            coeffs,
            factors,
            offsets,
        }
    }

    fn eval(&self, powers: &PowerTable) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let mut m = *c;
            for &(v, e) in &self.factors[self.offsets[k]..self.offsets[k + 1]] {
                m *= powers.get(v as usize, e);
            }
            acc += m;
        }
        acc
    }
}

/// Polynomials and their symbolic partial derivatives, ready for evaluation.
///
/// Safe to share across threads; evaluation allocates only scratch space.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    num_vars: usize,
    polys: Vec<CompiledPoly>,
    // Sparse Jacobian: (row, col, derivative) for nonzero partials only.
    partials: Vec<(usize, usize, CompiledPoly)>,
    max_exp: Vec<u32>,
}

impl CompiledSystem {
    pub fn new(polys: &[Poly], num_vars: usize) -> Self {
        let mut max_exp = vec![0; num_vars];
        for p in polys {
            for (v, m) in max_exp.iter_mut().enumerate() {
                *m = (*m).max(p.max_exponent(v));
            }
        }
        let mut partials = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            for j in 0..num_vars {
                if p.max_exponent(j) == 0 {
                    continue;
                }
                let d = p.derivative(j);
                if !d.is_zero() {
                    partials.push((i, j, CompiledPoly::new(&d)));
                }
            }
        }
        CompiledSystem {
            num_vars,
            polys: polys.iter().map(CompiledPoly::new).collect(),
            partials,
            max_exp,
        }
    }

    pub fn num_polys(&self) -> usize {
        self.polys.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn powers(&self, point: &[Complex]) -> PowerTable {
        debug_assert_eq!(point.len(), self.num_vars);
        PowerTable::new(point, |v| self.max_exp[v])
    }

    pub fn values(&self, point: &[Complex]) -> Vec<Complex> {
        let powers = self.powers(point);
        self.polys.iter().map(|p| p.eval(&powers)).collect()
    }

    /// Writes values and the Jacobian; `jac` must be zero-initialized or
    /// will be overwritten entry-by-entry.
    pub fn eval_into(
        &self,
        point: &[Complex],
        values: &mut DVector<Complex>,
        jac: &mut DMatrix<Complex>,
    ) {
        let powers = self.powers(point);
        for (i, p) in self.polys.iter().enumerate() {
            values[i] = p.eval(&powers);
        }
        jac.fill(Complex::new(0.0, 0.0));
        for (i, j, d) in &self.partials {
            jac[(*i, *j)] = d.eval(&powers);
        }
    }
}

/// An over-determined system replaced by `codim` general linear combinations.
#[derive(Debug, Clone)]
pub struct SquaredSystem {
    pub original: PolySystem,
    pub squared: PolySystem,
    /// `codim x r` mixing matrix; identity when the input was already square.
    pub mix_matrix: DMatrix<Complex>,
    pub seed: u64,
}

impl SquaredSystem {
    pub fn codim(&self) -> usize {
        self.squared.polys().len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.original.ambient_dim()
    }

    pub fn is_pass_through(&self) -> bool {
        self.original.polys().len() == self.squared.polys().len()
    }
}

/// Replaces the `r` polynomials of `system` by `codim` random combinations.
///
/// Entries of the mixing matrix are complex Gaussians drawn from `seed`.
pub fn square_system(system: &PolySystem, seed: u64) -> Result<SquaredSystem, AlgebraError> {
    let r = system.polys().len();
    let a = system.codim();
    if r < a {
        return Err(AlgebraError::Underdetermined { found: r, codim: a });
    }
    if r == a {
        return Ok(SquaredSystem {
            original: system.clone(),
            squared: system.clone(),
            mix_matrix: DMatrix::identity(a, a),
            seed,
        });
    }
    let mut rng = crate::rng::seeded(seed);
    let mix = DMatrix::from_fn(a, r, |_, _| complex_gaussian(&mut rng));
    let n = system.num_vars();
    let polys = (0..a)
        .map(|i| {
            system
                .polys()
                .iter()
                .enumerate()
                .fold(Poly::zero(n), |acc, (j, p)| &acc + &p.scale(mix[(i, j)]))
        })
        .collect();
    let squared = PolySystem::new(system.vars().to_vec(), polys, system.declared_dim())?;
    Ok(SquaredSystem {
        original: system.clone(),
        squared,
        mix_matrix: mix,
        seed,
    })
}

/// Random real diagonal change of coordinates `x_i -> d_i x_i`, `d_i in [0.5, 2]`.
///
/// Returns the transformed system together with the diagonal.
pub fn diagonal_change(system: &PolySystem, seed: u64) -> (PolySystem, Vec<f64>) {
    let mut rng = crate::rng::seeded(seed);
    let dist = Uniform::new_inclusive(0.5, 2.0).expect("valid range");
    let diag: Vec<f64> = (0..system.num_vars())
        .map(|_| dist.sample(&mut rng))
        .collect();
    (apply_diagonal(system, &diag), diag)
}

/// Substitutes `x_i -> diag[i] * x_i`.
pub fn apply_diagonal(system: &PolySystem, diag: &[f64]) -> PolySystem {
    let n = system.num_vars();
    assert_eq!(diag.len(), n);
    let polys = system
        .polys()
        .iter()
        .map(|p| {
            let terms = p.terms().iter().map(|t| {
                let scale: f64 = t
                    .exps
                    .0
                    .iter()
                    .zip(diag)
                    .map(|(&e, &d)| d.powi(e as i32))
                    .product();
                (t.exps.clone(), t.coeff * scale)
            });
            Poly::from_terms(n, terms)
        })
        .collect();
    PolySystem::new(system.vars().to_vec(), polys, system.declared_dim())
        .expect("same shape as input")
}

/// Random real orthogonal `n x n` matrix (QR of a Gaussian matrix).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column signs so the distribution does not depend on QR conventions.
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
