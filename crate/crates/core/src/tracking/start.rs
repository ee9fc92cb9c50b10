use rand::Rng;

use crate::algebra::{Poly, PolySystem, VariableGroups};
use crate::linalg::{solve, CMatrix, CVector};
use crate::rng::complex_gaussian;
use crate::Complex;

/// `constant + coeffs . z_g` over the variables of group `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFactor {
    pub group: usize,
    pub coeffs: Vec<Complex>,
    pub constant: Complex,
}

/// Start system whose `i`-th equation is a product of random affine linear
/// forms, `d_ig` of them in the variables of group `g`, where `d_ig` is the
/// degree of the `i`-th target equation in that group.
///
/// Its solutions are found by choosing one vanishing factor per equation so
/// that each group receives as many equations as it has variables, then
/// solving one small linear system per group.
#[derive(Debug, Clone)]
pub struct ProductStartSystem {
    num_vars: usize,
    groups: VariableGroups,
    equations: Vec<Vec<LinearFactor>>,
}

impl ProductStartSystem {
    pub fn random<R: Rng + ?Sized>(
        target: &PolySystem,
        groups: &VariableGroups,
        rng: &mut R,
    ) -> Self {
        let table = groups.multidegrees(target.polys());
        let equations = table
            .iter()
            .map(|row| {
                let mut factors = Vec::new();
                for (g, &d) in row.iter().enumerate() {
                    for _ in 0..d {
                        let size = groups.groups()[g].len();
                        factors.push(LinearFactor {
                            group: g,
                            coeffs: (0..size).map(|_| complex_gaussian(rng)).collect(),
                            constant: complex_gaussian(rng),
                        });
                    }
                }
                factors
            })
            .collect();
        ProductStartSystem {
            num_vars: target.num_vars(),
            groups: groups.clone(),
            equations,
        }
    }

    pub fn groups(&self) -> &VariableGroups {
        &self.groups
    }

    pub fn equations(&self) -> &[Vec<LinearFactor>] {
        &self.equations
    }

    fn factor_poly(&self, f: &LinearFactor) -> Poly {
        Poly::linear(
            self.num_vars,
            &self.groups.groups()[f.group],
            &f.coeffs,
            f.constant,
        )
    }

    /// The start system with every product expanded.
    pub fn to_system(&self, vars: &[String]) -> PolySystem {
        let one = Poly::constant(self.num_vars, Complex::new(1.0, 0.0));
        let polys = self
            .equations
            .iter()
            .map(|fs| {
                fs.iter()
                    .fold(one.clone(), |acc, f| &acc * &self.factor_poly(f))
            })
            .collect();
        PolySystem::square(vars.to_vec(), polys).expect("one equation per variable")
    }

    /// All solutions of the start system, one per admissible factor choice.
    pub fn start_points(&self) -> Vec<Vec<Complex>> {
        let sizes: Vec<usize> = self.groups.groups().iter().map(Vec::len).collect();
        let mut remaining = sizes.clone();
        let mut chosen: Vec<usize> = Vec::with_capacity(self.equations.len());
        let mut out = Vec::new();
        self.enumerate(0, &mut remaining, &mut chosen, &mut out);
        out
    }

    fn enumerate(
        &self,
        i: usize,
        remaining: &mut [usize],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<Complex>>,
    ) {
        if i == self.equations.len() {
            if let Some(p) = self.solve_choice(chosen) {
                out.push(p);
            }
            return;
        }
        for (k, f) in self.equations[i].iter().enumerate() {
            if remaining[f.group] == 0 {
                continue;
            }
            remaining[f.group] -= 1;
            chosen.push(k);
            self.enumerate(i + 1, remaining, chosen, out);
            chosen.pop();
            remaining[f.group] += 1;
        }
    }

    fn solve_choice(&self, chosen: &[usize]) -> Option<Vec<Complex>> {
        let mut point = vec![Complex::new(0.0, 0.0); self.num_vars];
        for (g, vars) in self.groups.groups().iter().enumerate() {
            let rows: Vec<&LinearFactor> = chosen
                .iter()
                .enumerate()
                .map(|(i, &k)| &self.equations[i][k])
                .filter(|f| f.group == g)
                .collect();
            let m = vars.len();
            debug_assert_eq!(rows.len(), m);
            let a = CMatrix::from_fn(m, m, |r, c| rows[r].coeffs[c]);
            let b = CVector::from_iterator(m, rows.iter().map(|f| -f.constant));
            let x = solve(&a, &b)?;
            for (c, &v) in vars.iter().enumerate() {
                point[v] = x[c];
            }
        }
        Some(point)
    }
}
