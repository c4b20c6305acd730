//! Distributions, orthonormal frames and the Reeb field.
//!
//! An [`SRStructure`] is a 2D subspace of a 3D Lie algebra, given by two
//! generators, with an inner product on it. The adapted frame is an
//! orthonormal pair `(f1, f2)` completed by the Reeb field `f0`, normalised
//! so that
//!
//! ```text
//! [f1, f0] = c01_1 f1 + c01_2 f2
//! [f2, f0] = c02_1 f1 + c02_2 f2
//! [f2, f1] = c12_1 f1 + c12_2 f2 + f0
//! ```

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra3, Vector3};
use crate::{Error, Result, Tolerance};

/// Relative slack for the frame invariants (zero `f0`-components, unit
/// `f0`-coefficient, trace identity).
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// The six structure constants of an adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameConstants {
    pub c01_1: f64,
    pub c01_2: f64,
    pub c02_1: f64,
    pub c02_2: f64,
    pub c12_1: f64,
    pub c12_2: f64,
}

impl FrameConstants {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.c01_1, self.c01_2, self.c02_1, self.c02_2, self.c12_1, self.c12_2,
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `1 + max |c|`, the reference magnitude for zero tests on the frame.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs()
    }

    /// The algebra whose basis `(e1, e2, e3)` is the frame `(f1, f2, f0)`.
    /// The result is antisymmetric by construction but satisfies Jacobi only
    /// if the constants obey the structural equations.
    pub fn to_algebra(&self) -> LieAlgebra3 {
        let mut c = [[[0.0; 3]; 3]; 3];
        let mut set = |i: usize, j: usize, v: [f64; 3]| {
            c[i][j] = v;
            c[j][i] = v.map(|x| -x);
        };
        set(0, 1, [-self.c12_1, -self.c12_2, -1.0]);
        set(0, 2, [self.c01_1, self.c01_2, 0.0]);
        set(1, 2, [self.c02_1, self.c02_2, 0.0]);
        LieAlgebra3::new(c)
            .expect("antisymmetric by construction")
            .with_labels(["f1", "f2", "f0"])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SRStructure {
    algebra: LieAlgebra3,
    span: [Vector3; 2],
    gram: Matrix2<f64>,
    coorientation: Option<Vector3>,
}

impl SRStructure {
    /// Validate generators and Gram matrix. The contact condition is not
    /// enforced here so that [`SRStructure::check_contact`] can report it.
    pub fn new(algebra: LieAlgebra3, span: [Vector3; 2], gram: Matrix2<f64>) -> Result<Self> {
        if span.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite("distribution generators"));
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Gram matrix"));
        }
        let [v1, v2] = &span;
        if v1.cross(v2).norm() <= 1e-12 * v1.norm() * v2.norm()
            || v1.norm() == 0.0
            || v2.norm() == 0.0
        {
            return Err(Error::DependentGenerators);
        }
        if (gram[(0, 1)] - gram[(1, 0)]).abs() > 1e-12 * gram.norm() {
            return Err(Error::InvalidArgument(
                "Gram matrix is not symmetric".into(),
            ));
        }
        let min_eigenvalue = SymmetricEigen::new(gram).eigenvalues.min();
        if min_eigenvalue <= 1e-12 * gram.norm() {
            return Err(Error::DegenerateGram { min_eigenvalue });
        }
        Ok(Self {
            algebra,
            span,
            gram,
            coorientation: None,
        })
    }

    /// Structure whose generators are declared orthonormal.
    pub fn orthonormal(algebra: LieAlgebra3, v1: Vector3, v2: Vector3) -> Result<Self> {
        Self::new(algebra, [v1, v2], Matrix2::identity())
    }

    /// Fix a co-orientation: a covector `omega` with `Δ ⊂ ker omega`. The
    /// Reeb field is then chosen with `omega(f0) > 0`, swapping `f1` and `f2`
    /// when needed, so the result no longer depends on generator order.
    pub fn with_coorientation(mut self, omega: Vector3) -> Result<Self> {
        let scale = omega.norm();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidArgument(
                "co-orientation must be a nonzero covector".into(),
            ));
        }
        for v in &self.span {
            if omega.dot(v).abs() > 1e-12 * scale * v.norm() {
                return Err(Error::InvalidArgument(
                    "co-orientation does not vanish on the distribution".into(),
                ));
            }
        }
        self.coorientation = Some(omega);
        Ok(self)
    }

    pub fn algebra(&self) -> &LieAlgebra3 {
        &self.algebra
    }

    pub fn span(&self) -> &[Vector3; 2] {
        &self.span
    }

    pub fn gram(&self) -> &Matrix2<f64> {
        &self.gram
    }

    pub fn coorientation(&self) -> Option<&Vector3> {
        self.coorientation.as_ref()
    }

    /// Coordinates of `x` with respect to the generators `(v1, v2)`, by least
    /// squares. Meaningful only for `x` in the distribution.
    pub fn span_coords(&self, x: &Vector3) -> [f64; 2] {
        let [v1, v2] = &self.span;
        let normal = Matrix2::new(v1.dot(v1), v1.dot(v2), v2.dot(v1), v2.dot(v2));
        let rhs = nalgebra::Vector2::new(v1.dot(x), v2.dot(x));
        let sol = normal.lu().solve(&rhs).expect("generators are independent");
        [sol[0], sol[1]]
    }

    /// The inner product of two vectors of the distribution.
    pub fn metric(&self, x: &Vector3, y: &Vector3) -> f64 {
        let a = nalgebra::Vector2::from(self.span_coords(x));
        let b = nalgebra::Vector2::from(self.span_coords(y));
        a.dot(&(self.gram * b))
    }

    /// Gram-Schmidt in the given metric, starting from `v1`.
    pub fn orthonormalize(&self) -> (Vector3, Vector3) {
        let g = &self.gram;
        let [v1, v2] = &self.span;
        let n1 = g[(0, 0)].sqrt();
        let f1 = v1 / n1;
        let proj = g[(0, 1)] / g[(0, 0)];
        let n2 = (g[(1, 1)] - g[(0, 1)] * proj).sqrt();
        let f2 = (v2 - v1 * proj) / n2;
        (f1, f2)
    }

    /// True iff `[v1, v2]` has a component transverse to the distribution,
    /// i.e. the distribution is not a subalgebra.
    pub fn check_contact(&self) -> bool {
        let [v1, v2] = &self.span;
        let w = self.algebra.bracket(v1, v2);
        let wn = w.norm();
        if wn <= 1e-12 * self.algebra.scale() * v1.norm() * v2.norm() {
            return false;
        }
        let normal = v1.cross(v2).normalize();
        w.dot(&normal).abs() > 1e-9 * wn
    }

    /// Orthonormalise, then build the Reeb field and the adapted frame.
    pub fn reeb_frame(&self) -> Result<AdaptedFrame> {
        if !self.check_contact() {
            return Err(Error::NotContact);
        }
        let (f1, f2) = self.orthonormalize();
        let frame = AdaptedFrame::from_pair(self.algebra.clone(), f1, f2)?;
        match self.coorientation {
            Some(omega) if omega.dot(&frame.f0) < 0.0 => {
                AdaptedFrame::from_pair(self.algebra.clone(), f2, f1)
            }
            _ => Ok(frame),
        }
    }
}

/// An orthonormal pair with its Reeb field and structure constants. All
/// vectors are coordinates in the basis of `algebra`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub algebra: LieAlgebra3,
    pub f1: Vector3,
    pub f2: Vector3,
    pub f0: Vector3,
    pub constants: FrameConstants,
}

impl AdaptedFrame {
    /// Complete an orthonormal pair by its Reeb field.
    ///
    /// With `v = [f2, f1]`, the Reeb field is `f0 = v - a f1 - b f2` where
    /// `a`, `b` cancel the `v`-components of `[f2, v]` and `[f1, v]`.
    pub fn from_pair(algebra: LieAlgebra3, f1: Vector3, f2: Vector3) -> Result<Self> {
        let v = algebra.bracket(&f2, &f1);
        let basis = Matrix3::from_columns(&[f1, f2, v]);
        let scale = algebra.scale() * (1.0 + f1.norm() + f2.norm()).powi(3);
        if basis.determinant().abs() <= 1e-12 * scale {
            return Err(Error::NotContact);
        }
        let lu = basis.lu();
        let v_component = |x: Vector3| lu.solve(&x).expect("basis is invertible")[2];
        let b = -v_component(algebra.bracket(&f1, &v));
        let a = v_component(algebra.bracket(&f2, &v));
        let f0 = v - f1 * a - f2 * b;
        Self::from_vectors(algebra, f1, f2, f0)
    }

    /// Read the six constants off the brackets of a given triple and check
    /// the adapted-frame invariants.
    pub fn from_vectors(
        algebra: LieAlgebra3,
        f1: Vector3,
        f2: Vector3,
        f0: Vector3,
    ) -> Result<Self> {
        let basis = Matrix3::from_columns(&[f1, f2, f0]);
        let lu = basis.lu();
        if basis.determinant() == 0.0 {
            return Err(Error::InvalidFrame(
                "f1, f2, f0 are linearly dependent".into(),
            ));
        }
        let coords = |x: Vector3| lu.solve(&x).expect("frame is a basis");
        let b10 = coords(algebra.bracket(&f1, &f0));
        let b20 = coords(algebra.bracket(&f2, &f0));
        let b21 = coords(algebra.bracket(&f2, &f1));
        let constants = FrameConstants {
            c01_1: b10[0],
            c01_2: b10[1],
            c02_1: b20[0],
            c02_2: b20[1],
            c12_1: b21[0],
            c12_2: b21[1],
        };
        let frame = Self {
            algebra,
            f1,
            f2,
            f0,
            constants,
        };
        let slack = FRAME_TOLERANCE * constants.scale();
        if (b21[2] - 1.0).abs() > slack {
            return Err(Error::InvalidFrame(format!(
                "f0-coefficient of [f2, f1] is {} instead of 1",
                b21[2]
            )));
        }
        if b10[2].abs() > slack || b20[2].abs() > slack {
            return Err(Error::InvalidFrame(format!(
                "[fi, f0] leaves the distribution (f0-components {:e}, {:e})",
                b10[2], b20[2]
            )));
        }
        let trace = constants.c01_1 + constants.c02_2;
        if trace.abs() > slack {
            return Err(Error::InvalidFrame(format!(
                "trace identity fails: c01_1 + c02_2 = {trace:e}"
            )));
        }
        Ok(frame)
    }

    /// The frame `(e1, e2, e3)` of the algebra built from `constants`.
    /// Fails with [`Error::Jacobi`] when the constants are not the structure
    /// constants of any Lie algebra.
    pub fn from_constants(constants: FrameConstants) -> Result<Self> {
        let algebra = constants.to_algebra();
        let report = algebra.check_jacobi();
        if !report.passed {
            return Err(Error::Jacobi {
                residual: report.residual,
                tolerance: report.tolerance,
            });
        }
        Self::from_vectors(algebra, Vector3::x(), Vector3::y(), Vector3::z())
    }

    /// Rotate the pair by a constant angle:
    /// `f1' = cos θ f1 - sin θ f2`, `f2' = sin θ f1 + cos θ f2`.
    /// The Reeb field is unchanged and the constants are recomputed.
    pub fn rotate(&self, theta: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        let f1 = self.f1 * c - self.f2 * s;
        let f2 = self.f1 * s + self.f2 * c;
        Self::from_vectors(self.algebra.clone(), f1, f2, self.f0)
    }

    /// Dilation by `lambda > 0`: `f1, f2` scale by `lambda`, `f0` by
    /// `lambda^2`. This is the orthonormal frame of the metric divided by
    /// `lambda^2`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be positive, got {lambda}"
            )));
        }
        Self::from_vectors(
            self.algebra.clone(),
            self.f1 * lambda,
            self.f2 * lambda,
            self.f0 * (lambda * lambda),
        )
    }

    /// The same frame with the algebra expressed in another basis (columns
    /// of `basis`).
    pub fn change_basis(&self, basis: &Matrix3<f64>) -> Result<Self> {
        let algebra = self.algebra.change_basis(basis)?;
        let inv = basis
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("basis change is singular".into()))?;
        Self::from_vectors(algebra, inv * self.f1, inv * self.f2, inv * self.f0)
    }

    /// Largest defect of the bracket relations against the stored constants.
    pub fn bracket_residual(&self) -> f64 {
        let k = &self.constants;
        let a = &self.algebra;
        let r10 = a.bracket(&self.f1, &self.f0) - (self.f1 * k.c01_1 + self.f2 * k.c01_2);
        let r20 = a.bracket(&self.f2, &self.f0) - (self.f1 * k.c02_1 + self.f2 * k.c02_2);
        let r21 = a.bracket(&self.f2, &self.f1) - (self.f1 * k.c12_1 + self.f2 * k.c12_2 + self.f0);
        r10.amax().max(r20.amax()).max(r21.amax())
    }

    pub fn tolerance_scale(&self) -> f64 {
        self.constants.scale()
    }

    pub fn is_zero(&self, x: f64, tol: Tolerance) -> bool {
        tol.is_zero(x, self.tolerance_scale())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn e(i: usize) -> Vector3 {
        Vector3::ith(i, 1.0)
    }

    fn assert_vec(a: &Vector3, b: &Vector3, tol: f64) {
        assert!((a - b).amax() <= tol, "{a:?} != {b:?}");
    }

    #[test]
    fn orthonormal_generators_are_unchanged() {
        let s = SRStructure::orthonormal(LieAlgebra3::heisenberg(), e(0), e(1)).unwrap();
        let (f1, f2) = s.orthonormalize();
        assert_eq!(f1, e(0));
        assert_eq!(f2, e(1));
    }

    #[test]
    fn diagonal_gram_rescales() {
        let s = SRStructure::new(
            LieAlgebra3::heisenberg(),
            [e(0), e(1)],
            Matrix2::new(4.0, 0.0, 0.0, 1.0),
        )
        .unwrap();
        let (f1, f2) = s.orthonormalize();
        assert_eq!(f1, e(0) / 2.0);
        assert_eq!(f2, e(1));
    }

    #[test]
    fn skew_gram_orthonormalizes() {
        let gram = Matrix2::new(2.0, 1.0, 1.0, 1.0);
        let s = SRStructure::new(LieAlgebra3::heisenberg(), [e(0), e(1)], gram).unwrap();
        let (f1, f2) = s.orthonormalize();
        // Recompute <fi, fj> = a^T gram b from the coordinates of fi in (e1, e2).
        let coords = |f: &Vector3| nalgebra::Vector2::new(f[0], f[1]);
        let ip = |x: &Vector3, y: &Vector3| coords(x).dot(&(gram * coords(y)));
        assert!((ip(&f1, &f1) - 1.0).abs() < 1e-12);
        assert!((ip(&f2, &f2) - 1.0).abs() < 1e-12);
        assert!(ip(&f1, &f2).abs() < 1e-12);
        assert!((s.metric(&f2, &f2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_structures() {
        let h = LieAlgebra3::heisenberg();
        assert_eq!(
            SRStructure::orthonormal(h.clone(), e(0), e(0) * 2.0),
            Err(Error::DependentGenerators)
        );
        assert!(matches!(
            SRStructure::new(h.clone(), [e(0), e(1)], Matrix2::new(1.0, 1.0, 1.0, 1.0)),
            Err(Error::DegenerateGram { .. })
        ));
        assert!(matches!(
            SRStructure::new(h, [e(0), e(1)], Matrix2::new(1.0, 0.0, 0.0, -1.0)),
            Err(Error::DegenerateGram { .. })
        ));
    }

    #[test]
    fn contact_condition() {
        let s = SRStructure::orthonormal(LieAlgebra3::heisenberg(), e(0), e(1)).unwrap();
        assert!(s.check_contact());
        let s = SRStructure::orthonormal(LieAlgebra3::abelian(), e(0), e(1)).unwrap();
        assert!(!s.check_contact());
        assert_eq!(s.reeb_frame(), Err(Error::NotContact));
        let s = SRStructure::orthonormal(LieAlgebra3::a_plus_r(), e(0), e(1)).unwrap();
        assert!(!s.check_contact());
        // Heisenberg with the centre in the distribution is a subalgebra too.
        let s = SRStructure::orthonormal(LieAlgebra3::heisenberg(), e(0), e(2)).unwrap();
        assert!(!s.check_contact());
    }

    #[test]
    fn heisenberg_reeb_field() {
        let s = SRStructure::orthonormal(LieAlgebra3::heisenberg(), e(1), e(0)).unwrap();
        let fr = s.reeb_frame().unwrap();
        assert_eq!(fr.f0, e(2));
        assert_eq!(fr.constants, FrameConstants::default());
    }

    #[test]
    fn a_plus_r_reeb_field() {
        let s = SRStructure::orthonormal(LieAlgebra3::a_plus_r(), e(1), e(0) + e(2)).unwrap();
        let fr = s.reeb_frame().unwrap();
        assert_vec(&fr.f0, &-e(2), 1e-15);
        let expected = FrameConstants {
            c12_2: 1.0,
            ..Default::default()
        };
        assert_eq!(fr.constants, expected);
    }

    #[test]
    fn sl2_reeb_field() {
        let s = SRStructure::orthonormal(LieAlgebra3::sl2(), e(0), e(1)).unwrap();
        let fr = s.reeb_frame().unwrap();
        assert_vec(&fr.f0, &-e(2), 1e-15);
        let expected = FrameConstants {
            c01_2: -1.0,
            c02_1: 1.0,
            ..Default::default()
        };
        assert_eq!(fr.constants, expected);
    }

    #[test]
    fn coorientation_fixes_reeb_sign() {
        let h = LieAlgebra3::heisenberg();
        let a = SRStructure::orthonormal(h.clone(), e(0), e(1))
            .unwrap()
            .with_coorientation(e(2))
            .unwrap();
        let b = SRStructure::orthonormal(h, e(1), e(0))
            .unwrap()
            .with_coorientation(e(2))
            .unwrap();
        assert_eq!(a.reeb_frame().unwrap().f0, e(2));
        assert_eq!(b.reeb_frame().unwrap().f0, e(2));
        assert!(a.clone().with_coorientation(e(0)).is_err());
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        let s = SRStructure::orthonormal(LieAlgebra3::sl2(), e(0), e(1)).unwrap();
        let fr = s.reeb_frame().unwrap();
        assert_eq!(fr.rotate(0.0).unwrap(), fr);
    }

    #[test]
    fn rotation_by_right_angle() {
        let k = FrameConstants {
            c01_2: 2.0,
            c12_2: 1.0,
            ..Default::default()
        };
        let fr = AdaptedFrame::from_constants(k).unwrap();
        let r = fr.rotate(FRAC_PI_2).unwrap();
        assert_vec(&r.f1, &-fr.f2, 1e-15);
        assert_vec(&r.f2, &fr.f1, 1e-15);
        assert_eq!(r.f0, fr.f0);
        assert!((r.constants.c12_1 + k.c12_2).abs() < 1e-15);
        assert!((r.constants.c12_2 - k.c12_1).abs() < 1e-15);
    }

    #[test]
    fn from_constants_rejects_jacobi_violation() {
        // c02_1 c12_2 != 0 breaks the structural equations.
        let k = FrameConstants {
            c02_1: 1.0,
            c01_2: 1.0,
            c12_2: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            AdaptedFrame::from_constants(k),
            Err(Error::Jacobi { .. })
        ));
    }

    #[test]
    fn dilation_scales_constants() {
        let k = FrameConstants {
            c01_2: 2.0,
            c12_2: 1.0,
            ..Default::default()
        };
        let fr = AdaptedFrame::from_constants(k).unwrap();
        let d = fr.dilate(3.0).unwrap();
        assert!((d.constants.c01_2 - 18.0).abs() < 1e-12);
        assert!((d.constants.c12_2 - 3.0).abs() < 1e-12);
        assert!(fr.dilate(0.0).is_err());
    }

    #[test]
    fn from_vectors_rejects_non_reeb_field() {
        let h = LieAlgebra3::heisenberg();
        // f0 = 2 e3 breaks the unit coefficient of [f2, f1].
        let err = AdaptedFrame::from_vectors(h, e(1), e(0), e(2) * 2.0).unwrap_err();
        assert!(matches!(err, Error::InvalidFrame(_)));
    }
}
