//! Conservation laws and closed forms that the geodesic flow must satisfy.
//!
//! Every check takes the covector field as a parameter so the same harness
//! can be pointed at deliberately broken fields.

use nalgebra::{Matrix2, Matrix3, Vector3 as NVector3};

use super::{
    geodesic_flow, integrate_geodesic_with, GeodesicState, GroupElement, GroupModel, ModelId,
    VerticalField,
};
use crate::check::{max_nan, CheckResult};
use crate::frame::{AdaptedFrame, SRStructure};
use crate::numeric::rk4_integrate;
use crate::{Error, Result, Vector3};

/// A structure on the model's algebra with no special alignment: all six
/// frame constants are nonzero on the semisimple models.
pub fn generic_structure(id: ModelId) -> SRStructure {
    let v1 = Vector3::new(1.0, 0.3, 0.2);
    let v2 = Vector3::new(-0.2, 1.0, 0.5);
    let gram = Matrix2::new(1.3, 0.2, 0.2, 0.8);
    SRStructure::new(id.algebra(), [v1, v2], gram).expect("valid generic structure")
}

pub fn generic_model(id: ModelId) -> GroupModel {
    let frame = generic_structure(id)
        .reeb_frame()
        .expect("generic structures are contact");
    GroupModel::new(id, frame).expect("generic realisation")
}

/// Largest `|H(t) - H(0)|` and largest manifold defect along the geodesic.
pub fn conservation(
    model: &GroupModel,
    h: [f64; 3],
    t: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<(f64, f64)> {
    let init = GeodesicState::at_identity(model, h);
    let h_init = init.hamiltonian();
    let (mut energy, mut defect) = (0.0f64, 0.0f64);
    geodesic_flow(model, &init, t, steps, rhs, |s| {
        energy = max_nan(energy, (s.hamiltonian() - h_init).abs());
        defect = max_nan(defect, model.manifold_defect(&s.g));
    })?;
    Ok((energy, defect))
}

/// Largest deviation of `(h1, h2)` from `(cos h0 t, -sin h0 t)` on the
/// standard Heisenberg model, starting from `(1, 0, h0)`.
pub fn heisenberg_closed_form_error(
    h0: f64,
    t: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<f64> {
    let model = GroupModel::standard(ModelId::Heisenberg);
    let traj = integrate_geodesic_with(
        &model,
        &GeodesicState::at_identity(&model, [1.0, 0.0, h0]),
        t,
        steps,
        rhs,
    )?;
    Ok(traj.states.iter().fold(0.0, |m, s| {
        let (sn, cs) = (h0 * s.t).sin_cos();
        max_nan(
            m,
            (s.h[0] - cs)
                .abs()
                .max((s.h[1] + sn).abs())
                .max((s.h[2] - h0).abs()),
        )
    }))
}

/// Killing form in the frame basis `(f1, f2, f0)`.
fn frame_killing(frame: &AdaptedFrame) -> Matrix3<f64> {
    let k = frame.algebra.killing_form();
    let f = [frame.f1, frame.f2, frame.f0];
    Matrix3::from_fn(|i, j| f[i].dot(&(k * f[j])))
}

/// Least-squares coordinates of a matrix in the span of the generators.
fn generator_coords(model: &GroupModel) -> impl Fn(&GroupElement) -> [f64; 3] + '_ {
    let cols: Vec<Vec<f64>> = model.generators.iter().map(|g| g.entries()).collect();
    let gram = Matrix3::from_fn(|i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum());
    let inv = gram.try_inverse().expect("generators are independent");
    move |m: &GroupElement| {
        let e = m.entries();
        let rhs = NVector3::from_fn(|i, _| cols[i].iter().zip(&e).map(|(a, b)| a * b).sum());
        (inv * rhs).into()
    }
}

/// Drift of the momentum `μ(Y) = h(g^-1 Y g)`, which left-invariance
/// makes constant along every normal geodesic.
pub fn noether_drift(
    model: &GroupModel,
    h: [f64; 3],
    t: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<f64> {
    let coords = generator_coords(model);
    let momentum = |g: &GroupElement, h: [f64; 3]| -> Result<[f64; 3]> {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("singular group element".into()))?;
        Ok(std::array::from_fn(|k| {
            let c = coords(&inv.mul(&model.generators[k]).mul(g));
            c[0] * h[0] + c[1] * h[1] + c[2] * h[2]
        }))
    };
    let init = GeodesicState::at_identity(model, h);
    let m0 = momentum(&init.g, h)?;
    let mut drift = 0.0f64;
    let mut failure = None;
    geodesic_flow(model, &init, t, steps, rhs, |s| match momentum(&s.g, s.h) {
        Ok(m) => {
            for k in 0..3 {
                drift = max_nan(drift, (m[k] - m0[k]).abs());
            }
        }
        Err(e) => failure = Some(e),
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(drift),
    }
}

/// Drift of the Casimir `h^T K^-1 h` along the covector flow alone.
pub fn casimir_drift(
    frame: &AdaptedFrame,
    h: [f64; 3],
    t: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<f64> {
    let kinv = frame_killing(frame)
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("Killing form is degenerate".into()))?;
    let casimir = |h: &[f64; 3]| {
        let v = NVector3::from(*h);
        v.dot(&(kinv * v))
    };
    let c0 = casimir(&h);
    let k = frame.constants;
    let dt = t / steps.max(1) as f64;
    let mut y = h;
    let mut drift = 0.0f64;
    for _ in 0..steps.max(1) {
        y = rk4_integrate(&y, dt, 1, |h| rhs(&k, *h));
        drift = max_nan(drift, (casimir(&y) - c0).abs());
    }
    Ok(drift)
}

/// Ratio `e(N) / e(2N)` of endpoint errors (group element and covector)
/// against the Richardson extrapolation of the `2N` and `4N` endpoints.
/// Fourth-order convergence gives a ratio near 16.
pub fn rk4_order_ratio(
    model: &GroupModel,
    h: [f64; 3],
    t: f64,
    n: usize,
    rhs: VerticalField<'_>,
) -> Result<f64> {
    let init = GeodesicState::at_identity(model, h);
    let end = |steps| geodesic_flow(model, &init, t, steps, rhs, |_| {});
    let (e1, e2, e4) = (end(n)?, end(2 * n)?, end(4 * n)?);
    let flat = |s: &GeodesicState| {
        let mut v = s.g.entries();
        v.extend_from_slice(&s.h);
        v
    };
    let (a, b, c) = (flat(&e1), flat(&e2), flat(&e4));
    let reference: Vec<f64> = b.iter().zip(&c).map(|(b, c)| c + (c - b) / 15.0).collect();
    let err = |x: &[f64]| {
        x.iter()
            .zip(&reference)
            .fold(0.0f64, |m, (x, r)| m.max((x - r).abs()))
    };
    Ok(err(&a) / err(&b))
}

/// Largest `|g0 * endpoint(e) - endpoint(g0)|` along the geodesic.
pub fn left_invariance_error(
    model: &GroupModel,
    g0: &GroupElement,
    h: [f64; 3],
    t: f64,
    steps: usize,
    rhs: VerticalField<'_>,
) -> Result<f64> {
    let from_e =
        integrate_geodesic_with(model, &GeodesicState::at_identity(model, h), t, steps, rhs)?;
    let shifted = GeodesicState { t: 0.0, g: *g0, h };
    let from_g0 = integrate_geodesic_with(model, &shifted, t, steps, rhs)?;
    Ok(from_e
        .states
        .iter()
        .zip(&from_g0.states)
        .fold(0.0, |m, (a, b)| max_nan(m, g0.mul(&a.g).distance(&b.g))))
}

/// A blow-up under test is a failed check, not an error of the harness.
fn nan_on_blowup(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::BlowUp { .. }) => Ok(f64::NAN),
        other => other,
    }
}

/// Everything the covector field is certified against. Each line is
/// expected to pass for the true field.
pub fn certify_vertical(rhs: VerticalField<'_>) -> Result<Vec<CheckResult>> {
    const T: f64 = 2.0;
    const STEPS: usize = 2000;
    let h = [0.6, 0.8, 0.7];
    let mut out = Vec::new();

    let mut energy = 0.0f64;
    let mut models = Vec::new();
    for id in ModelId::ALL {
        models.push(GroupModel::standard(id));
        models.push(generic_model(id));
    }
    for m in &models {
        energy = max_nan(
            energy,
            nan_on_blowup(conservation(m, h, T, STEPS, rhs).map(|c| c.0))?,
        );
    }
    out.push(CheckResult::new(
        "energy_conservation",
        models.len(),
        energy,
        1e-9,
    ));

    out.push(CheckResult::new(
        "heisenberg_closed_form",
        STEPS + 1,
        nan_on_blowup(heisenberg_closed_form_error(1.3, T, STEPS, rhs))?,
        1e-9,
    ));

    let mut noether = 0.0f64;
    for m in &models {
        noether = max_nan(noether, nan_on_blowup(noether_drift(m, h, T, STEPS, rhs))?);
    }
    out.push(CheckResult::new(
        "noether_momentum",
        models.len(),
        noether,
        1e-8,
    ));

    let sl2 = generic_model(ModelId::Sl2);
    out.push(CheckResult::new(
        "sl2_casimir",
        STEPS,
        nan_on_blowup(casimir_drift(&sl2.frame, h, T, STEPS, rhs))?,
        1e-9,
    ));
    Ok(out)
}
