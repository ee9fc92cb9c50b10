use crate::algebra::PolySystem;
use crate::linalg::{CMatrix, CVector};
use crate::Complex;

/// Values of a homotopy and its partial derivatives at one `(z, t)`.
#[derive(Debug, Clone)]
pub struct HomotopyEval {
    pub value: CVector,
    pub jz: CMatrix,
    pub jt: CVector,
}

impl HomotopyEval {
    pub fn zeros(n: usize) -> Self {
        HomotopyEval {
            value: CVector::zeros(n),
            jz: CMatrix::zeros(n, n),
            jt: CVector::zeros(n),
        }
    }
}

/// A square family `H(z, t)`, `z in C^N`, tracked from `t = 1` to `t = 0`.
///
/// Implementations must be callable from several threads at once.
pub trait HomotopyProblem: Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> &str;

    fn evaluate(&self, z: &[Complex], t: f64, out: &mut HomotopyEval);

    /// `max_i |value_i| / scale_i(z, t)` where `scale_i >= 1` bounds the size
    /// of the terms of equation `i`; rounding makes smaller residuals
    /// unreachable. The default uses no scaling.
    fn relative_residual(&self, value: &CVector, _z: &[Complex], _t: f64) -> f64 {
        value.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn value(&self, z: &[Complex], t: f64) -> CVector {
        let mut e = HomotopyEval::zeros(self.dim());
        self.evaluate(z, t, &mut e);
        e.value
    }
}

/// `H(z, t) = base(z) + t * slope(z)` for polynomial systems `base`, `slope`.
///
/// Every homotopy in this crate has this shape: the gamma-trick homotopy
/// `(1 - t) T + gamma t S` has `base = T`, `slope = gamma S - T`, and the
/// bottleneck homotopy is affine in `t` once `s = alpha(t)` is substituted.
#[derive(Debug, Clone)]
pub struct PolyHomotopy {
    label: String,
    base: PolySystem,
    slope: PolySystem,
}

impl PolyHomotopy {
    pub fn new(label: impl Into<String>, base: PolySystem, slope: PolySystem) -> Self {
        assert_eq!(base.num_vars(), slope.num_vars());
        assert_eq!(
            base.polys().len(),
            base.num_vars(),
            "homotopy must be square"
        );
        assert_eq!(
            slope.polys().len(),
            base.num_vars(),
            "homotopy must be square"
        );
        PolyHomotopy {
            label: label.into(),
            base,
            slope,
        }
    }

    /// `(1 - t) target + gamma t start`.
    pub fn gamma_trick(
        label: impl Into<String>,
        target: &PolySystem,
        start: &PolySystem,
        gamma: Complex,
    ) -> Self {
        assert_eq!(target.vars(), start.vars());
        let slope_polys = target
            .polys()
            .iter()
            .zip(start.polys())
            .map(|(t, s)| &s.scale(gamma) - t)
            .collect();
        let slope = PolySystem::square(target.vars().to_vec(), slope_polys)
            .expect("square by construction");
        Self::new(label, target.clone(), slope)
    }

    pub fn base(&self) -> &PolySystem {
        &self.base
    }

    pub fn slope(&self) -> &PolySystem {
        &self.slope
    }

    pub fn vars(&self) -> &[String] {
        self.base.vars()
    }
}

impl HomotopyProblem for PolyHomotopy {
    fn dim(&self) -> usize {
        self.base.num_vars()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn evaluate(&self, z: &[Complex], t: f64, out: &mut HomotopyEval) {
        let n = self.dim();
        let mut slope_val = CVector::zeros(n);
        let mut slope_jac = CMatrix::zeros(n, n);
        self.base
            .compiled()
            .eval_into(z, &mut out.value, &mut out.jz);
        self.slope
            .compiled()
            .eval_into(z, &mut slope_val, &mut slope_jac);
        let tc = Complex::new(t, 0.0);
        out.value.axpy(tc, &slope_val, Complex::new(1.0, 0.0));
        out.jz.zip_apply(&slope_jac, |a, b| *a += tc * b);
        out.jt.copy_from(&slope_val);
    }

    fn relative_residual(&self, value: &CVector, z: &[Complex], t: f64) -> f64 {
        let radius = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        value
            .iter()
            .zip(self.base.polys().iter().zip(self.slope.polys()))
            .map(|(v, (b, s))| {
                let scale = b.magnitude_bound(radius) + t.abs() * s.magnitude_bound(radius);
                v.norm() / scale.max(1.0)
            })
            .fold(0.0, f64::max)
    }
}
