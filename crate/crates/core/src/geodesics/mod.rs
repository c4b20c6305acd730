//! Normal geodesics on concrete models of the four groups with a standard
//! matrix (or quaternion) realisation.
//!
//! The covector is tracked through `h_i = <λ, f_i>` for the adapted frame
//! `(f1, f2, f0)`; with `h = (h1^2 + h2^2)/2` the Hamiltonian system is
//!
//! ```text
//! g'  = g (h1 A1 + h2 A2)
//! h1' =  h2 (c12_1 h1 + c12_2 h2 + h0)
//! h2' = -h1 (c12_1 h1 + c12_2 h2 + h0)
//! h0' = (c01_1 h1 + c01_2 h2) h1 + (c02_1 h1 + c02_2 h2) h2
//! ```
//!
//! where `A_i` realises `f_i`. The `h0` equation is the bracket form
//! `{h, h0}`; the other two follow from `{h_i, h_j} = <λ, [f_i, f_j]>`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Quaternion};
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra3, Vector3};
use crate::frame::{AdaptedFrame, FrameConstants, SRStructure};
use crate::numeric::{rk4_step, Axpy};
use crate::{Error, Result};

pub mod certify;
pub mod shooting;

pub use shooting::{shoot_distance, ShootingOptions, ShootingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Heisenberg,
    APlusR,
    Sl2,
    Su2,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [
        ModelId::Heisenberg,
        ModelId::APlusR,
        ModelId::Sl2,
        ModelId::Su2,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ModelId::Heisenberg => "heisenberg",
            ModelId::APlusR => "a_plus_r",
            ModelId::Sl2 => "sl2",
            ModelId::Su2 => "su2",
        }
    }

    /// The model's algebra in the basis realised by [`ModelId::basis`].
    pub fn algebra(self) -> LieAlgebra3 {
        match self {
            ModelId::Heisenberg => LieAlgebra3::heisenberg(),
            ModelId::APlusR => LieAlgebra3::a_plus_r(),
            ModelId::Sl2 => LieAlgebra3::sl2(),
            ModelId::Su2 => LieAlgebra3::su2(),
        }
    }

    /// Realisation of the algebra basis `(e1, e2, e3)`.
    ///
    /// * Heisenberg: `E01, E12, E02` (strictly upper triangular 3x3).
    /// * A+(R)+R: `e1 = E02`, `e2 = -E00`, `e3 = E12`; the group is
    ///   `[[a, 0, b], [0, 1, c], [0, 0, 1]]` with `a > 0`.
    /// * sl(2): `diag(1,-1)/2`, `[[0,1],[1,0]]/2`, `[[0,1],[-1,0]]/2`.
    /// * su(2): the quaternions `i/2, j/2, k/2`.
    pub fn basis(self) -> [GroupElement; 3] {
        let unit = |r: usize, c: usize| {
            let mut m = Matrix3::zeros();
            m[(r, c)] = 1.0;
            m
        };
        match self {
            ModelId::Heisenberg => [unit(0, 1), unit(1, 2), unit(0, 2)].map(GroupElement::M3),
            ModelId::APlusR => [unit(0, 2), -unit(0, 0), unit(1, 2)].map(GroupElement::M3),
            ModelId::Sl2 => [
                Matrix2::new(0.5, 0.0, 0.0, -0.5),
                Matrix2::new(0.0, 0.5, 0.5, 0.0),
                Matrix2::new(0.0, 0.5, -0.5, 0.0),
            ]
            .map(GroupElement::M2),
            ModelId::Su2 => [
                Quaternion::new(0.0, 0.5, 0.0, 0.0),
                Quaternion::new(0.0, 0.0, 0.5, 0.0),
                Quaternion::new(0.0, 0.0, 0.0, 0.5),
            ]
            .map(GroupElement::Q),
        }
    }

    /// The standard structure of the model: `Δ = {e1, e2}` orthonormal,
    /// except on A+(R)+R where `Δ = {e2, e1 + e3}`.
    pub fn structure(self) -> SRStructure {
        let (v1, v2) = match self {
            ModelId::APlusR => (Vector3::y(), Vector3::x() + Vector3::z()),
            _ => (Vector3::x(), Vector3::y()),
        };
        SRStructure::orthonormal(self.algebra(), v1, v2).expect("independent generators")
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown model '{s}' (expected heisenberg, a_plus_r, sl2 or su2)"
                ))
            })
    }
}

/// A group element or Lie algebra element of one of the models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    M2(Matrix2<f64>),
    M3(Matrix3<f64>),
    Q(Quaternion<f64>),
}

impl GroupElement {
    pub fn identity_like(&self) -> Self {
        match self {
            GroupElement::M2(_) => GroupElement::M2(Matrix2::identity()),
            GroupElement::M3(_) => GroupElement::M3(Matrix3::identity()),
            GroupElement::Q(_) => GroupElement::Q(Quaternion::identity()),
        }
    }

    pub fn zero_like(&self) -> Self {
        match self {
            GroupElement::M2(_) => GroupElement::M2(Matrix2::zeros()),
            GroupElement::M3(_) => GroupElement::M3(Matrix3::zeros()),
            GroupElement::Q(_) => GroupElement::Q(Quaternion::new(0.0, 0.0, 0.0, 0.0)),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (GroupElement::M2(a), GroupElement::M2(b)) => GroupElement::M2(a * b),
            (GroupElement::M3(a), GroupElement::M3(b)) => GroupElement::M3(a * b),
            (GroupElement::Q(a), GroupElement::Q(b)) => GroupElement::Q(a * b),
            _ => panic!("mixed group element representations"),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        match self {
            GroupElement::M2(a) => GroupElement::M2(a * s),
            GroupElement::M3(a) => GroupElement::M3(a * s),
            GroupElement::Q(a) => GroupElement::Q(a * s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).axpy(-1.0, &other.mul(self))
    }

    pub fn inverse(&self) -> Option<Self> {
        match self {
            GroupElement::M2(a) => a.try_inverse().map(GroupElement::M2),
            GroupElement::M3(a) => a.try_inverse().map(GroupElement::M3),
            GroupElement::Q(a) => a.try_inverse().map(GroupElement::Q),
        }
    }

    /// Row-major matrix entries, or `(w, x, y, z)` for a quaternion.
    pub fn entries(&self) -> Vec<f64> {
        match self {
            GroupElement::M2(a) => a.transpose().iter().copied().collect(),
            GroupElement::M3(a) => a.transpose().iter().copied().collect(),
            GroupElement::Q(q) => vec![q.w, q.i, q.j, q.k],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference. A quaternion and its negative are
    /// different elements of SU(2), so no sign is identified.
    pub fn distance(&self, other: &Self) -> f64 {
        self.axpy(-1.0, other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.is_finite())
    }

    /// Matrix exponential (scaling and squaring with a Taylor series) or
    /// quaternion exponential.
    pub fn exp(&self) -> Self {
        match self {
            GroupElement::Q(q) => GroupElement::Q(q.exp()),
            _ => {
                let norm = self.max_abs() * 3.0;
                let squarings = if norm > 0.5 {
                    (norm / 0.5).log2().ceil() as u32
                } else {
                    0
                };
                let a = self.scale(0.5f64.powi(squarings as i32));
                let mut term = a.identity_like();
                let mut sum = term;
                for n in 1..=20 {
                    term = term.mul(&a).scale(1.0 / n as f64);
                    sum = sum.add(&term);
                }
                for _ in 0..squarings {
                    sum = sum.mul(&sum);
                }
                sum
            }
        }
    }
}

impl Axpy for GroupElement {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        match (self, dx) {
            (GroupElement::M2(x), GroupElement::M2(d)) => GroupElement::M2(x.axpy(a, d)),
            (GroupElement::M3(x), GroupElement::M3(d)) => GroupElement::M3(x.axpy(a, d)),
            (GroupElement::Q(x), GroupElement::Q(d)) => GroupElement::Q(x + d * a),
            _ => panic!("mixed group element representations"),
        }
    }
}

/// A concrete group with generators realising an adapted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupModel {
    pub id: ModelId,
    pub frame: AdaptedFrame,
    /// Realisations of `(f1, f2, f0)`.
    pub generators: [GroupElement; 3],
}

impl GroupModel {
    /// Realise `frame`, which must live on the model's algebra in its
    /// standard basis.
    pub fn new(id: ModelId, frame: AdaptedFrame) -> Result<Self> {
        if frame.algebra.constants() != id.algebra().constants() {
            return Err(Error::InvalidArgument(format!(
                "frame is not defined on the standard basis of the {id} algebra"
            )));
        }
        let basis = id.basis();
        let realise =
            |v: &Vector3| (0..3).fold(basis[0].zero_like(), |acc, k| acc.axpy(v[k], &basis[k]));
        let generators = [realise(&frame.f1), realise(&frame.f2), realise(&frame.f0)];
        let model = Self {
            id,
            frame,
            generators,
        };
        let residual = model.generator_residual();
        if residual > 1e-12 * model.frame.tolerance_scale() {
            return Err(Error::InvalidFrame(format!(
                "generator commutators miss the frame constants by {residual:e}"
            )));
        }
        Ok(model)
    }

    /// The model with the adapted frame of [`ModelId::structure`].
    pub fn standard(id: ModelId) -> Self {
        let frame = id
            .structure()
            .reeb_frame()
            .expect("standard structures are contact");
        Self::new(id, frame).expect("standard realisation")
    }

    pub fn identity(&self) -> GroupElement {
        self.generators[0].identity_like()
    }

    /// `u1 A1 + u2 A2 + u0 A0`.
    pub fn algebra_element(&self, u: [f64; 3]) -> GroupElement {
        let [a1, a2, a0] = &self.generators;
        a1.scale(u[0]).axpy(u[1], a2).axpy(u[2], a0)
    }

    /// Largest defect of the commutator relations of the frame, computed
    /// from the generators.
    pub fn generator_residual(&self) -> f64 {
        let k = &self.frame.constants;
        let [a1, a2, a0] = &self.generators;
        let r10 = a1
            .commutator(a0)
            .distance(&self.algebra_element([k.c01_1, k.c01_2, 0.0]));
        let r20 = a2
            .commutator(a0)
            .distance(&self.algebra_element([k.c02_1, k.c02_2, 0.0]));
        let r21 = a2
            .commutator(a1)
            .distance(&self.algebra_element([k.c12_1, k.c12_2, 1.0]));
        r10.max(r20).max(r21)
    }

    /// Distance of `g` from the group: `|det - 1|` on SL(2), `||q| - 1|` on
    /// SU(2), and the largest deviation of the fixed entries (plus
    /// positivity of the diagonal entry on A+) on the triangular models.
    pub fn manifold_defect(&self, g: &GroupElement) -> f64 {
        match (self.id, g) {
            (ModelId::Sl2, GroupElement::M2(m)) => (m.determinant() - 1.0).abs(),
            (ModelId::Su2, GroupElement::Q(q)) => (q.norm() - 1.0).abs(),
            (ModelId::Heisenberg, GroupElement::M3(m)) => {
                let fixed = [
                    (m[(0, 0)] - 1.0).abs(),
                    (m[(1, 1)] - 1.0).abs(),
                    (m[(2, 2)] - 1.0).abs(),
                    m[(1, 0)].abs(),
                    m[(2, 0)].abs(),
                    m[(2, 1)].abs(),
                ];
                fixed.into_iter().fold(0.0, f64::max)
            }
            (ModelId::APlusR, GroupElement::M3(m)) => {
                let fixed = [
                    m[(0, 1)].abs(),
                    m[(1, 0)].abs(),
                    (m[(1, 1)] - 1.0).abs(),
                    m[(2, 0)].abs(),
                    m[(2, 1)].abs(),
                    (m[(2, 2)] - 1.0).abs(),
                ];
                let d = fixed.into_iter().fold(0.0, f64::max);
                if m[(0, 0)] > 0.0 {
                    d
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    fn renormalize(&self, g: GroupElement) -> GroupElement {
        match g {
            GroupElement::Q(q) => GroupElement::Q(q / q.norm()),
            other => other,
        }
    }
}

/// Right-hand side of the covector equations.
pub fn vertical_rhs(k: &FrameConstants, h: [f64; 3]) -> [f64; 3] {
    let [h1, h2, h0] = h;
    let s = k.c12_1 * h1 + k.c12_2 * h2 + h0;
    [
        h2 * s,
        -h1 * s,
        (k.c01_1 * h1 + k.c01_2 * h2) * h1 + (k.c02_1 * h1 + k.c02_2 * h2) * h2,
    ]
}

/// Signature shared by [`vertical_rhs`] and its test doubles.
pub type VerticalField<'a> = &'a dyn Fn(&FrameConstants, [f64; 3]) -> [f64; 3];

/// Group element plus covector coordinates `(h1, h2, h0)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub g: GroupElement,
    pub h: [f64; 3],
}

impl GeodesicState {
    pub fn at_identity(model: &GroupModel, h: [f64; 3]) -> Self {
        Self {
            t: 0.0,
            g: model.identity(),
            h,
        }
    }

    pub fn hamiltonian(&self) -> f64 {
        0.5 * (self.h[0] * self.h[0] + self.h[1] * self.h[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("trajectory is never empty")
    }

    /// CSV with header `t,h1,h2,h0,g00,g01,...` (quaternions as `q0..q3`).
    pub fn to_csv(&self) -> String {
        let first = &self.states[0].g;
        let mut out = String::from("t,h1,h2,h0");
        match first {
            GroupElement::Q(_) => (0..4).for_each(|i| out.push_str(&format!(",q{i}"))),
            other => {
                let n = (other.entries().len() as f64).sqrt() as usize;
                for r in 0..n {
                    for c in 0..n {
                        out.push_str(&format!(",g{r}{c}"));
                    }
                }
            }
        }
        out.push('\n');
        for s in &self.states {
            out.push_str(&format!("{},{},{},{}", s.t, s.h[0], s.h[1], s.h[2]));
            for v in s.g.entries() {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Integrate the geodesic flow with `steps` RK4 steps over `[0, t_final]`,
/// recording every state.
pub fn integrate_geodesic(
    model: &GroupModel,
    initial: &GeodesicState,
    t_final: f64,
    steps: usize,
) -> Result<Trajectory> {
    integrate_geodesic_with(model, initial, t_final, steps, &vertical_rhs)
}

/// [`integrate_geodesic`] with a replaceable covector field.
pub fn integrate_geodesic_with(
    model: &GroupModel,
    initial: &GeodesicState,
    t_final: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(*initial);
    geodesic_flow(model, initial, t_final, steps, rhs, |s| states.push(*s))?;
    Ok(Trajectory { states })
}

/// Endpoint of the geodesic flow without storing the trajectory.
pub fn geodesic_endpoint(
    model: &GroupModel,
    initial: &GeodesicState,
    t_final: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<GeodesicState> {
    geodesic_flow(model, initial, t_final, steps, rhs, |_| {})
}

pub(crate) fn geodesic_flow(
    model: &GroupModel,
    initial: &GeodesicState,
    t_final: f64,
    steps: usize,
    rhs: VerticalField<'_>,
    mut observe: impl FnMut(&GeodesicState),
) -> Result<GeodesicState> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let k = model.frame.constants;
    let field = |y: &(GroupElement, [f64; 3])| {
        let (g, h) = y;
        let u = model.algebra_element([h[0], h[1], 0.0]);
        (g.mul(&u), rhs(&k, *h))
    };
    let dt = t_final / steps as f64;
    let mut y = (initial.g, initial.h);
    let mut state = *initial;
    for step in 1..=steps {
        let (g, h) = rk4_step(&y, dt, field);
        if !g.is_finite() || h.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { step });
        }
        y = (model.renormalize(g), h);
        state = GeodesicState {
            t: initial.t + dt * step as f64,
            g: y.0,
            h: y.1,
        };
        observe(&state);
    }
    Ok(state)
}

/// One piece of a piecewise-constant control `(u1, u2, u0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSegment {
    pub u: [f64; 3],
    pub duration: f64,
}

/// Integrate `g' = g (u1 A1 + u2 A2 + u0 A0)` from `g0` with
/// `steps_per_segment` RK4 steps on each piece.
pub fn integrate_controls(
    model: &GroupModel,
    g0: &GroupElement,
    controls: &[ControlSegment],
    steps_per_segment: usize,
) -> Result<GroupElement> {
    if controls.is_empty() {
        return Err(Error::InvalidArgument("control schedule is empty".into()));
    }
    if steps_per_segment == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let mut g = *g0;
    let mut step = 0;
    for seg in controls {
        let u = model.algebra_element(seg.u);
        let dt = seg.duration / steps_per_segment as f64;
        for _ in 0..steps_per_segment {
            step += 1;
            g = model.renormalize(rk4_step(&g, dt, |x: &GroupElement| x.mul(&u)));
            if !g.is_finite() {
                return Err(Error::BlowUp { step });
            }
        }
    }
    Ok(g)
}
