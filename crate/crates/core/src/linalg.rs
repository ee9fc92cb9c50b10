//! Dense complex linear algebra used by the tracker and the verifiers.

use nalgebra::{DMatrix, DVector};

use crate::Complex;

pub type CMatrix = DMatrix<Complex>;
pub type CVector = DVector<Complex>;

/// Solves `a x = b` by partially pivoted LU. `None` if a pivot vanishes or
/// the result is not finite.
pub fn solve(a: &CMatrix, b: &CVector) -> Option<CVector> {
    let lu = a.clone().lu();
    let x = lu.solve(b)?;
    x.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(x)
}

fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number `|A|_1 |A^-1|_1`, infinite for singular `A`.
pub fn condition_number(a: &CMatrix) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    match a.clone().lu().try_inverse() {
        Some(inv) if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
            norm1(a) * norm1(&inv)
        }
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis of the column span, by Gram-Schmidt with one round of
/// reorthogonalization. Columns whose remainder falls below `1e-10` of the
/// largest column norm are treated as dependent.
pub fn orthonormal_basis(cols: &CMatrix) -> Vec<CVector> {
    let largest = cols.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<CVector> = Vec::new();
    if largest == 0.0 {
        return basis;
    }
    for c in cols.column_iter() {
        let mut q: CVector = c.into_owned();
        for _ in 0..2 {
            for b in &basis {
                let coef = b.dotc(&q);
                q -= b * coef;
            }
        }
        let norm = q.norm();
        if norm > 1e-10 * largest {
            basis.push(q / Complex::new(norm, 0.0));
        }
    }
    basis
}

/// Distance from `r` to the column span of `cols`, divided by `max(1, |r|)`.
pub fn span_residual(cols: &CMatrix, r: &CVector) -> f64 {
    let scale = r.norm().max(1.0);
    let basis = orthonormal_basis(cols);
    let mut rest = r.clone();
    for _ in 0..2 {
        for b in &basis {
            let coef = b.dotc(&rest);
            rest -= b * coef;
        }
    }
    rest.norm() / scale
}

pub fn max_abs(z: &[Complex]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn solve_and_condition() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let b = CVector::from_vec(vec![c(1.0, 0.0), c(3.0, 0.0)]);
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x - &b).norm() < 1e-14);
        assert!(condition_number(&a).is_finite());
        let s =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(condition_number(&s) > 1e15);
    }

    #[test]
    fn span_residual_of_member_is_zero() {
        let cols = CMatrix::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]);
        let r = CVector::from_vec(vec![c(2.0, 1.0), c(-1.0, 2.0), c(4.0, 2.0)]);
        assert!(span_residual(&cols, &r) < 1e-14);
        let off = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(span_residual(&cols, &off) > 0.1);
    }

    #[test]
    fn rank_deficient_complex_span() {
        // Third column is a complex combination of the first two.
        let a = [c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1)];
        let b = [c(1.1, 0.4), c(-0.2, 0.9), c(0.6, -1.5)];
        let (p, q) = (c(0.8, -0.3), c(-1.4, 2.2));
        let third: Vec<Complex> = (0..3).map(|i| p * a[i] + q * b[i]).collect();
        let cols = CMatrix::from_fn(3, 3, |i, j| [a[i], b[i], third[i]][j]);
        assert_eq!(orthonormal_basis(&cols).len(), 2);
        let member = CVector::from_fn(3, |i, _| c(0.5, 0.5) * a[i] - c(2.0, -1.0) * b[i]);
        assert!(span_residual(&cols, &member) < 1e-14);
    }
}
