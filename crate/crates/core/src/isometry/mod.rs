//! The global isometry between `A+(R) x S^1` and `SL(2)`.
//!
//! `A+(R) + R` is realised as the matrices `[[-y, 0, x], [0, 1, z], [0, 0, 1]]`
//! with `y < 0`, so points are `(x, y, z)` and the identity is `(0, -1, 0)`.
//! In polar coordinates `x = ρ sin θ`, `y = -ρ cos θ`, `|θ| < π/2`, and with
//! `φ = z/2` the isometry reads
//!
//! ```text
//! Ψ(ρ, θ, φ) = (ρ cos θ)^(-1/2) [[cos φ, sin φ], [ρ sin(θ - φ), ρ cos(θ - φ)]]
//! ```
//!
//! It is the composition `G ∘ F^-1` of the endpoint maps of two control
//! systems with identical bracket relations.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;

use crate::{Error, Result};

pub mod certify;

/// A point of `A+(R) + R` in matrix coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct APoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl APoint {
    pub const IDENTITY: APoint = APoint {
        x: 0.0,
        y: -1.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("A+ point"));
        }
        if y >= 0.0 {
            return Err(Error::ChartExit(format!("y = {y} is not negative")));
        }
        Ok(Self { x, y, z })
    }

    /// Group law `(x, y, z)(x', y', z') = (x - y x', -y y', z + z')`.
    pub fn mul(&self, o: &APoint) -> APoint {
        APoint {
            x: self.x - self.y * o.x,
            y: -self.y * o.y,
            z: self.z + o.z,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(-self.y, 0.0, self.x, 0.0, 1.0, self.z, 0.0, 0.0, 1.0)
    }

    /// `ξ = tan(θ/2)`, computed as `x / (ρ - y)`, which equals
    /// `(y + ρ) / x` for `x != 0` and needs no special case at `x = 0`.
    pub fn xi(&self) -> f64 {
        self.x / (self.x.hypot(self.y) - self.y)
    }

    pub fn to_polar(&self) -> PolarPoint {
        PolarPoint {
            rho: self.x.hypot(self.y),
            theta: self.x.atan2(-self.y),
            phi: 0.5 * self.z,
        }
    }
}

/// Polar coordinates on the half-plane and `φ = z/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub rho: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(rho.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite("polar point"));
        }
        if rho <= 0.0 || theta.abs() >= FRAC_PI_2 {
            return Err(Error::ChartExit(format!(
                "(rho, theta) = ({rho}, {theta}) is outside rho > 0, |theta| < pi/2"
            )));
        }
        Ok(Self { rho, theta, phi })
    }

    pub fn to_cartesian(&self) -> APoint {
        let (s, c) = self.theta.sin_cos();
        APoint {
            x: self.rho * s,
            y: -self.rho * c,
            z: 2.0 * self.phi,
        }
    }
}

/// An element of `SL(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SL2Element {
    pub m: Matrix2<f64>,
}

impl SL2Element {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let det = m.determinant();
        if (det - 1.0).abs() > 1e-10 * m.norm_squared().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "determinant {det} is not 1"
            )));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
        }
    }
}

/// The generators `g1, g2, g0 = -g3` of `sl(2)`.
pub fn sl2_generators() -> [Matrix2<f64>; 3] {
    [
        Matrix2::new(0.5, 0.0, 0.0, -0.5),
        Matrix2::new(0.0, 0.5, 0.5, 0.0),
        Matrix2::new(0.0, -0.5, 0.5, 0.0),
    ]
}

/// The left-invariant frame `f1 = -y ∂y`, `f2 = -y ∂x + ∂z`.
pub fn frame(p: &APoint) -> ([f64; 3], [f64; 3]) {
    ([0.0, -p.y, 0.0], [-p.y, 0.0, 1.0])
}

/// The canonical (rotated by `θ = z`) frame:
/// `f̂1 = (y sin z, -y cos z, -sin z)`, `f̂2 = (-y cos z, -y sin z, cos z)`.
pub fn frame_hat(p: &APoint) -> ([f64; 3], [f64; 3]) {
    let (s, c) = p.z.sin_cos();
    let y = p.y;
    ([y * s, -y * c, -s], [-y * c, -y * s, c])
}

/// The Reeb field `f0 = -∂z`.
pub fn reeb(_p: &APoint) -> [f64; 3] {
    [0.0, 0.0, -1.0]
}

/// `F(t1, t2, t0)`, the endpoint of the flows of `f̂1`, `f̂2`, `f0` for
/// times `2 t1`, `2 t2`, `2 t0` from the identity.
pub fn map_f(t1: f64, t2: f64, t0: f64) -> APoint {
    let tau = t2.tanh();
    let scale = (-2.0 * t1).exp() / (1.0 + tau * tau);
    APoint {
        x: 2.0 * scale * tau,
        y: -scale * (1.0 - tau * tau),
        z: 2.0 * (tau.atan() - t0),
    }
}

/// Inverse of [`map_f`]: `(-log(ρ)/2, artanh ξ, arctan ξ - z/2)`.
pub fn map_f_inv(p: &APoint) -> Result<(f64, f64, f64)> {
    if p.y >= 0.0 {
        return Err(Error::ChartExit(format!("y = {} is not negative", p.y)));
    }
    let rho = p.x.hypot(p.y);
    let xi = p.xi();
    Ok((-0.5 * rho.ln(), xi.atanh(), xi.atan() - 0.5 * p.z))
}

/// `G(t1, t2, t0) = diag(e^t1, e^-t1) · [[cosh t2, sinh t2], [sinh t2, cosh t2]]
/// · [[cos t0, -sin t0], [sin t0, cos t0]]`, the endpoint of the flows of
/// `g1`, `g2`, `g0` for times `2 t1`, `2 t2`, `2 t0`.
pub fn map_g(t1: f64, t2: f64, t0: f64) -> SL2Element {
    let d = Matrix2::new(t1.exp(), 0.0, 0.0, (-t1).exp());
    let (sh, ch) = (t2.sinh(), t2.cosh());
    let h = Matrix2::new(ch, sh, sh, ch);
    let (s, c) = t0.sin_cos();
    let r = Matrix2::new(c, -s, s, c);
    SL2Element { m: d * h * r }
}

/// `Ψ(ρ, θ, φ)`.
pub fn map_psi(p: &PolarPoint) -> SL2Element {
    SL2Element { m: psi_matrix(p) }
}

pub(crate) fn psi_matrix(p: &PolarPoint) -> Matrix2<f64> {
    let PolarPoint { rho, theta, phi } = *p;
    let k = (rho * theta.cos()).sqrt().recip();
    Matrix2::new(
        k * phi.cos(),
        k * phi.sin(),
        k * rho * (theta - phi).sin(),
        k * rho * (theta - phi).cos(),
    )
}
