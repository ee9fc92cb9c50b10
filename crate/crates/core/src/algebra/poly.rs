//! Sparse multivariate polynomials with complex coefficients.
//!
//! Terms are kept sorted in descending graded-lex order (total degree first,
//! then lexicographic with `x1 > x2 > ...`). Exponent vectors are unique and
//! coefficients with modulus below [`COEFF_EPS`] are dropped on construction,
//! so two polynomials compare equal iff they have the same canonical form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::Complex;

/// Coefficients with modulus below this are treated as zero.
pub const COEFF_EPS: f64 = 1e-300;

/// Exponent vector ordered by graded-lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exps: Monomial,
    pub coeff: Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    num_vars: usize,
    terms: Vec<Term>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Complex) -> Self {
        Self::from_terms(num_vars, [(Monomial::one(num_vars), c)])
    }

    /// The coordinate polynomial `x_index`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Self::from_terms(num_vars, [(Monomial(e), Complex::new(1.0, 0.0))])
    }

    /// Affine linear form `constant + sum_i coeffs[i] * x_{vars[i]}`.
    pub fn linear(num_vars: usize, vars: &[usize], coeffs: &[Complex], constant: Complex) -> Self {
        assert_eq!(vars.len(), coeffs.len());
        let mut terms = Vec::with_capacity(vars.len() + 1);
        for (&v, &c) in vars.iter().zip(coeffs) {
            let mut e = vec![0; num_vars];
            e[v] = 1;
            terms.push((Monomial(e), c));
        }
        terms.push((Monomial::one(num_vars), constant));
        Self::from_terms(num_vars, terms)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex)>,
    {
        let mut acc: BTreeMap<Monomial, Complex> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), num_vars, "exponent vector length mismatch");
            *acc.entry(m).or_insert(Complex::new(0.0, 0.0)) += c;
        }
        Self::from_sorted_map(num_vars, acc)
    }

    fn from_sorted_map(num_vars: usize, acc: BTreeMap<Monomial, Complex>) -> Self {
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| c.norm() >= COEFF_EPS)
            .map(|(exps, coeff)| Term { exps, coeff })
            .collect();
        Poly { num_vars, terms }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.first().map(|t| t.exps.degree()).unwrap_or(0)
    }

    /// Degree in the given subset of variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .iter()
            .map(|t| vars.iter().map(|&v| t.exps.0[v]).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn max_exponent(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.exps.0[var]).max().unwrap_or(0)
    }

    /// Sum of coefficient moduli.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Evaluates at `point`, summing terms in stored (graded-lex) order.
    ///
    /// Powers of each coordinate are computed once per call.
    pub fn evaluate(&self, point: &[Complex]) -> Complex {
        assert_eq!(point.len(), self.num_vars, "point dimension mismatch");
        let powers = PowerTable::new(point, |v| self.max_exponent(v));
        self.terms.iter().fold(Complex::new(0.0, 0.0), |acc, t| {
            acc + t.coeff * powers.monomial(&t.exps.0)
        })
    }

    /// An upper bound for `|p(z)|` over points with `|z_i| <= radius`.
    pub fn magnitude_bound(&self, radius: f64) -> f64 {
        let r = radius.max(1.0);
        self.terms
            .iter()
            .map(|t| t.coeff.norm() * r.powi(t.exps.degree() as i32))
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Poly {
        assert!(var < self.num_vars);
        let terms = self.terms.iter().filter(|t| t.exps.0[var] > 0).map(|t| {
            let mut e = t.exps.0.clone();
            let k = e[var];
            e[var] -= 1;
            (Monomial(e), t.coeff * k as f64)
        });
        Poly::from_terms(self.num_vars, terms)
    }

    pub fn scale(&self, c: Complex) -> Poly {
        let terms = self.terms.iter().map(|t| (t.exps.clone(), t.coeff * c));
        Poly::from_terms(self.num_vars, terms)
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::constant(self.num_vars, Complex::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Re-indexes variables into a larger ring: variable `i` becomes
    /// `mapping[i]` among `num_vars` variables.
    pub fn embed(&self, num_vars: usize, mapping: &[usize]) -> Poly {
        assert_eq!(mapping.len(), self.num_vars);
        let terms = self.terms.iter().map(|t| {
            let mut e = vec![0; num_vars];
            for (i, &k) in t.exps.0.iter().enumerate() {
                e[mapping[i]] += k;
            }
            (Monomial(e), t.coeff)
        });
        Poly::from_terms(num_vars, terms)
    }

    /// Substitutes `x_i -> images[i]` for every variable.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.num_vars);
        let target_vars = images.first().map(|p| p.num_vars).unwrap_or(0);
        let mut cache: Vec<Vec<Poly>> = images
            .iter()
            .map(|p| {
                vec![
                    Poly::constant(target_vars, Complex::new(1.0, 0.0)),
                    p.clone(),
                ]
            })
            .collect();
        let mut acc = BTreeMap::new();
        for t in &self.terms {
            let mut prod = Poly::constant(target_vars, t.coeff);
            for (v, &k) in t.exps.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[v].len() <= k as usize {
                    let next = cache[v].last().unwrap() * &images[v];
                    cache[v].push(next);
                }
                prod = &prod * &cache[v][k as usize];
            }
            for term in prod.terms {
                *acc.entry(term.exps).or_insert(Complex::new(0.0, 0.0)) += term.coeff;
            }
        }
        Poly::from_sorted_map(target_vars, acc)
    }
}

/// Cached integer powers of each coordinate of a point.
pub(crate) struct PowerTable {
    powers: Vec<Vec<Complex>>,
}

impl PowerTable {
    pub(crate) fn new(point: &[Complex], max_exp: impl Fn(usize) -> u32) -> Self {
        let powers = point
            .iter()
            .enumerate()
            .map(|(v, &z)| {
                let m = max_exp(v) as usize;
                let mut p = Vec::with_capacity(m + 1);
                p.push(Complex::new(1.0, 0.0));
                for k in 1..=m {
                    let prev = p[k - 1];
                    p.push(prev * z);
                }
                p
            })
            .collect();
        PowerTable { powers }
    }

    pub(crate) fn get(&self, var: usize, exp: u32) -> Complex {
        self.powers[var][exp as usize]
    }

    fn monomial(&self, exps: &[u32]) -> Complex {
        exps.iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .fold(Complex::new(1.0, 0.0), |acc, (v, &k)| {
                acc * self.powers[v][k as usize]
            })
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.num_vars, rhs.num_vars);
        let terms = self
            .terms
            .iter()
            .chain(&rhs.terms)
            .map(|t| (t.exps.clone(), t.coeff));
        Poly::from_terms(self.num_vars, terms)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: -t.coeff,
                })
                .collect(),
        }
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut acc: BTreeMap<Monomial, Complex> = BTreeMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let e: Vec<u32> = a.exps.0.iter().zip(&b.exps.0).map(|(x, y)| x + y).collect();
                *acc.entry(Monomial(e)).or_insert(Complex::new(0.0, 0.0)) += a.coeff * b.coeff;
            }
        }
        Poly::from_sorted_map(self.num_vars, acc)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// Formats a real number so that parsing it back yields the same bits.
pub(crate) fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_coeff(c: Complex) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_real(c.im))
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs()))
    }
}

/// Prints in the canonical text form accepted by the parser.
pub struct PolyDisplay<'a> {
    pub poly: &'a Poly,
    pub names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, t) in self.poly.terms.iter().enumerate() {
            // Purely real negative coefficients read better as subtraction.
            let (neg, c) = if t.coeff.im == 0.0 && t.coeff.re < 0.0 {
                (true, -t.coeff)
            } else {
                (false, t.coeff)
            };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = t
                .exps
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        self.names[v].clone()
                    } else {
                        format!("{}^{}", self.names[v], e)
                    }
                })
                .collect();
            let unit = c == Complex::new(1.0, 0.0);
            if vars.is_empty() {
                f.write_str(&fmt_coeff(c))?;
            } else if unit {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_coeff(c), vars.join("*"))?;
            }
        }
        Ok(())
    }
}
