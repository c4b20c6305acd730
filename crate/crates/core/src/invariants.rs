//! The metric invariants `chi` and `kappa`.
//!
//! For a left-invariant structure the Poisson bracket `{h, h0}` is the
//! traceless quadratic form
//!
//! ```text
//! c01_1 h1^2 + (c01_2 + c02_1) h1 h2 + c02_2 h2^2
//! ```
//!
//! on the distribution; `chi` is its positive eigenvalue and
//! `kappa = -(c12_1)^2 - (c12_2)^2 + (c01_2 - c02_1) / 2`.
//! Both are invariant under rotations of the frame and homogeneous of degree
//! two under dilations.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::frame::{AdaptedFrame, FrameConstants};
use crate::{Error, Result, Tolerance};

/// The quadratic form `{h, h0}` in the frame coordinates `(h1, h2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketForm {
    pub q: Matrix2<f64>,
}

impl BracketForm {
    pub fn of(k: &FrameConstants) -> Self {
        let off = 0.5 * (k.c01_2 + k.c02_1);
        Self {
            q: Matrix2::new(k.c01_1, off, off, k.c02_2),
        }
    }

    pub fn eval(&self, h1: f64, h2: f64) -> f64 {
        let h = nalgebra::Vector2::new(h1, h2);
        h.dot(&(self.q * h))
    }
}

pub fn bracket_form(fr: &AdaptedFrame) -> BracketForm {
    BracketForm::of(&fr.constants)
}

/// `sqrt(-det {h, h0})`. Written as a sum of squares so that it is
/// non-negative even when the trace identity holds only up to rounding.
pub fn chi(k: &FrameConstants) -> f64 {
    (0.5 * (k.c01_1 - k.c02_2)).hypot(0.5 * (k.c01_2 + k.c02_1))
}

/// The left-invariant specialisation: the derivative terms of the general
/// definition vanish because the structure constants are constant.
pub fn kappa(k: &FrameConstants) -> f64 {
    -k.c12_1 * k.c12_1 - k.c12_2 * k.c12_2 + 0.5 * (k.c01_2 - k.c02_1)
}

pub fn compute_chi(fr: &AdaptedFrame) -> f64 {
    chi(&fr.constants)
}

pub fn compute_kappa(fr: &AdaptedFrame) -> f64 {
    kappa(&fr.constants)
}

/// A normalised invariant pair and the dilation factor that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub chi: f64,
    pub kappa: f64,
    pub dilation: f64,
}

impl Invariants {
    /// Dilate so that `chi = kappa = 0` or `chi^2 + kappa^2 = 1`.
    ///
    /// Pairs with `max(|chi|, |kappa|) <= tol * scale` are returned as exact
    /// zeros with dilation 1. Otherwise the dilation is
    /// `lambda = (chi^2 + kappa^2)^(-1/4)` and the pair is multiplied by
    /// `lambda^2`.
    pub fn normalize(chi: f64, kappa: f64, tol: Tolerance, scale: f64) -> Self {
        if tol.is_zero(chi.abs().max(kappa.abs()), scale) {
            return Self {
                chi: 0.0,
                kappa: 0.0,
                dilation: 1.0,
            };
        }
        let r = chi.hypot(kappa);
        Self {
            chi: chi / r,
            kappa: kappa / r,
            dilation: r.sqrt().recip(),
        }
    }

    /// Raw invariants of a frame, normalised with the frame's own scale.
    pub fn of_frame(fr: &AdaptedFrame, tol: Tolerance) -> Self {
        Self::normalize(
            compute_chi(fr),
            compute_kappa(fr),
            tol,
            fr.tolerance_scale(),
        )
    }
}

/// Free function form of [`Invariants::normalize`] with unit scale.
pub fn normalize(chi: f64, kappa: f64) -> Invariants {
    Invariants::normalize(chi, kappa, Tolerance::default(), 1.0)
}

/// Rotation angle taking the bracket form to `[[0, chi], [chi, 0]]`, in
/// `[0, pi)`.
///
/// Under `f1' = cos θ f1 - sin θ f2`, `f2' = sin θ f1 + cos θ f2` a traceless
/// form `[[a, b], [b, -a]]` becomes
/// `[[a cos 2θ - b sin 2θ, a sin 2θ + b cos 2θ], ...]`, so `2θ = atan2(a, b)`
/// zeroes the diagonal and leaves `+chi` off it.
pub fn canonical_angle(k: &FrameConstants) -> f64 {
    let a = 0.5 * (k.c01_1 - k.c02_2);
    let b = 0.5 * (k.c01_2 + k.c02_1);
    let theta = 0.5 * a.atan2(b);
    if theta < 0.0 {
        theta + std::f64::consts::PI
    } else {
        theta
    }
}

/// The canonical frame for `chi > 0` and the angle used to reach it.
///
/// The rotation is fixed up to `θ -> θ + π`, which flips the signs of both
/// `c12` constants; the branch with `c12_1 > 0`, or `c12_1 = 0` and
/// `c12_2 >= 0`, is returned.
pub fn canonical_frame(fr: &AdaptedFrame, tol: Tolerance) -> Result<(AdaptedFrame, f64)> {
    let scale = fr.tolerance_scale();
    let x = compute_chi(fr);
    if tol.is_zero(x, scale) {
        return Err(Error::ChiZero { chi: x });
    }
    let theta = canonical_angle(&fr.constants);
    let rotated = fr.rotate(theta)?;
    let k = &rotated.constants;
    let flip = if tol.is_zero(k.c12_1, scale) {
        !tol.is_zero(k.c12_2, scale) && k.c12_2 < 0.0
    } else {
        k.c12_1 < 0.0
    };
    if flip {
        let theta = theta + std::f64::consts::PI;
        Ok((fr.rotate(theta)?, theta))
    } else {
        Ok((rotated, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{LieAlgebra3, Vector3};
    use crate::frame::SRStructure;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn k(c01_1: f64, c01_2: f64, c02_1: f64, c02_2: f64, c12_1: f64, c12_2: f64) -> FrameConstants {
        FrameConstants {
            c01_1,
            c01_2,
            c02_1,
            c02_2,
            c12_1,
            c12_2,
        }
    }

    #[test]
    fn bracket_forms() {
        assert_eq!(
            BracketForm::of(&k(0., 0., 0., 0., 0., 0.)).q,
            Matrix2::zeros()
        );
        assert_eq!(
            BracketForm::of(&k(0., -1., 1., 0., 0., 0.)).q,
            Matrix2::zeros()
        );
        assert_eq!(
            BracketForm::of(&k(0., 2., 0., 0., 0., 0.)).q,
            Matrix2::new(0., 1., 1., 0.)
        );
    }

    #[test]
    fn chi_and_kappa_examples() {
        let heis = k(0., 0., 0., 0., 0., 0.);
        assert_eq!((chi(&heis), kappa(&heis)), (0.0, 0.0));
        let aplus = k(0., 0., 0., 0., 0., 1.);
        assert_eq!((chi(&aplus), kappa(&aplus)), (0.0, -1.0));
        let sle = k(0., -1., 1., 0., 0., 0.);
        assert_eq!((chi(&sle), kappa(&sle)), (0.0, -1.0));
        let se2 = k(0., SQRT_2, 0., 0., 0., 0.);
        assert!((chi(&se2) - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((chi(&se2).powi(2) + kappa(&se2).powi(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi_equals_sqrt_of_minus_det() {
        let f = k(0.3, -1.2, 0.7, -0.3, 0.4, 2.0);
        let det = BracketForm::of(&f).q.determinant();
        assert!((chi(&f) - (-det).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalization() {
        let n = normalize(0.0, 0.0);
        assert_eq!((n.chi, n.kappa, n.dilation), (0.0, 0.0, 1.0));
        let n = normalize(0.0, -4.0);
        assert_eq!((n.chi, n.kappa, n.dilation), (0.0, -1.0, 0.5));
        let n = normalize(3.0, 4.0);
        assert!((n.chi - 0.6).abs() < 1e-15);
        assert!((n.kappa - 0.8).abs() < 1e-15);
        assert!((n.dilation - 5f64.powf(-0.5)).abs() < 1e-15);
        let n = normalize(1e-12, -1e-11);
        assert_eq!((n.chi, n.kappa, n.dilation), (0.0, 0.0, 1.0));
    }

    #[test]
    fn canonical_angle_for_diagonal_form() {
        // bracket form [[1, 0], [0, -1]]
        let f = k(1., 0., 0., -1., 0., 0.);
        assert!((canonical_angle(&f) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn canonical_frame_of_diagonal_form() {
        // [e3, e1] = e1, [e3, e2] = -e2 with distribution {(e1 + e2)/√2, e3}
        // has form [[0, 1/2], [1/2, 0]]; a -π/4 turn makes it diagonal.
        let a = LieAlgebra3::from_brackets(&[(2, 0, 0, 1.0), (2, 1, 1, -1.0)]).unwrap();
        let s = SRStructure::orthonormal(a, Vector3::new(1.0, 1.0, 0.0) / SQRT_2, Vector3::z())
            .unwrap();
        let fr = s.reeb_frame().unwrap().rotate(-FRAC_PI_4).unwrap();
        let q = bracket_form(&fr).q;
        assert!(q[(0, 1)].abs() < 1e-15);
        assert!((q[(0, 0)] - 0.5).abs() < 1e-15);
        let (can, theta) = canonical_frame(&fr, Tolerance::default()).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-15 || (theta - 5.0 * FRAC_PI_4).abs() < 1e-15);
        let qc = bracket_form(&can).q;
        assert!(qc[(0, 0)].abs() < 1e-15 && qc[(1, 1)].abs() < 1e-15);
        assert!((qc[(0, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn canonical_frame_leaves_canonical_frame_alone() {
        let fr = AdaptedFrame::from_constants(k(0., 2., 0., 0., 0., 0.)).unwrap();
        let (can, theta) = canonical_frame(&fr, Tolerance::default()).unwrap();
        assert_eq!(theta, 0.0);
        assert_eq!(can, fr);
    }

    #[test]
    fn canonical_frame_rejects_chi_zero() {
        let fr = AdaptedFrame::from_constants(k(0., -1., 1., 0., 0., 0.)).unwrap();
        assert!(matches!(
            canonical_frame(&fr, Tolerance::default()),
            Err(Error::ChiZero { .. })
        ));
    }

    #[test]
    fn canonical_frame_fixes_c12_sign() {
        // solv+ member rotated by an arbitrary angle
        let fr = AdaptedFrame::from_constants(k(0., 2., 0., 0., 0., 1.)).unwrap();
        for theta in [0.3, 1.9, 3.5, 5.0] {
            let (can, _) =
                canonical_frame(&fr.rotate(theta).unwrap(), Tolerance::default()).unwrap();
            let c = can.constants;
            assert!(c.c12_1.abs() < 1e-12);
            assert!((c.c12_2 - 1.0).abs() < 1e-12, "{c:?}");
            assert!((c.c01_2 - 2.0).abs() < 1e-12);
        }
    }
}
