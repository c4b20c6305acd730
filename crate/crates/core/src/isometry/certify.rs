//! Numerical certification that `Ψ` is a sub-Riemannian isometry.
//!
//! Every check that evaluates `Ψ` takes it as a parameter, so the harness
//! can be run against corrupted transcriptions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    frame, frame_hat, map_f, map_f_inv, map_g, psi_matrix, reeb, sl2_generators, APoint, PolarPoint,
};
use crate::check::{max_nan, CheckResult};
use crate::geodesics::{integrate_controls, ControlSegment, GroupElement, GroupModel, ModelId};
use crate::numeric::rk4_integrate;
use crate::{Error, Result};

/// A candidate for `Ψ`, in polar coordinates with `φ = z/2`.
pub type PsiFn<'a> = &'a dyn Fn(&PolarPoint) -> Matrix2<f64>;

/// The transcribed `Ψ`.
pub fn true_psi(p: &PolarPoint) -> Matrix2<f64> {
    psi_matrix(p)
}

fn psi_at(psi: PsiFn<'_>, p: &APoint) -> Matrix2<f64> {
    psi(&p.to_polar())
}

/// `‖Ψ(F(t)) - G(t)‖∞`.
pub fn psi_consistency(psi: PsiFn<'_>, t1: f64, t2: f64, t0: f64) -> f64 {
    (psi_at(psi, &map_f(t1, t2, t0)) - map_g(t1, t2, t0).m).amax()
}

/// Runs the control schedule on both systems from their identities and
/// returns `‖Ψ(q(T)) - x(T)‖∞`. `steps` is the total number of RK4 steps.
pub fn nagano_check(psi: PsiFn<'_>, controls: &[ControlSegment], steps: usize) -> Result<f64> {
    if controls.is_empty() {
        return Err(Error::InvalidArgument("control schedule is empty".into()));
    }
    let per_segment = (steps / controls.len()).max(1);
    let mut q = APoint::IDENTITY.as_array();
    for seg in controls {
        let [u1, u2, u0] = seg.u;
        q = rk4_integrate(&q, seg.duration, per_segment, |q| {
            let p = APoint {
                x: q[0],
                y: q[1],
                z: q[2],
            };
            let (a, b) = frame_hat(&p);
            let c = reeb(&p);
            std::array::from_fn(|k| u1 * a[k] + u2 * b[k] + u0 * c[k])
        });
        if !(q[1] < 0.0 && q[2].abs() < 2.0 * PI) {
            return Err(Error::ChartExit(format!(
                "control path left the chart at {q:?}"
            )));
        }
    }
    let model = GroupModel::standard(ModelId::Sl2);
    let x = integrate_controls(&model, &model.identity(), controls, per_segment)?;
    let p = APoint::new(q[0], q[1], q[2])?;
    Ok(GroupElement::M2(psi_at(psi, &p)).distance(&x))
}

fn flow(field: fn(&APoint) -> [f64; 3], p: &APoint, t: f64) -> APoint {
    let q = rk4_integrate(&p.as_array(), t, 8, |q| {
        field(&APoint {
            x: q[0],
            y: q[1],
            z: q[2],
        })
    });
    APoint {
        x: q[0],
        y: q[1],
        z: q[2],
    }
}

fn fhat1(p: &APoint) -> [f64; 3] {
    frame_hat(p).0
}

fn fhat2(p: &APoint) -> [f64; 3] {
    frame_hat(p).1
}

const FIELDS: [fn(&APoint) -> [f64; 3]; 3] = [fhat1, fhat2, reeb];

/// Largest `‖(Ψ(flow_eps(p)) - Ψ(p))/eps - Ψ(p) g_i‖∞` over `f̂1, f̂2, f0`,
/// which is `O(eps)` exactly when `Ψ` pushes each field to its
/// left-invariant counterpart.
pub fn pushforward_check(psi: PsiFn<'_>, p: &APoint, eps: f64) -> f64 {
    let g = sl2_generators();
    let base = psi_at(psi, p);
    FIELDS.iter().zip(&g).fold(0.0, |m, (f, gi)| {
        let moved = psi_at(psi, &flow(*f, p, eps));
        max_nan(m, ((moved - base) / eps - base * gi).amax())
    })
}

/// Coordinates of a traceless matrix in the basis `(g1, g2, g0)`.
fn sl2_coords(m: &Matrix2<f64>) -> [f64; 3] {
    [
        m[(0, 0)] - m[(1, 1)],
        m[(0, 1)] + m[(1, 0)],
        m[(1, 0)] - m[(0, 1)],
    ]
}

/// `Ψ(p)^-1 Ψ_* f̂_i` as coordinates in `(g1, g2, g0)`, by central
/// differences along the flow.
fn pulled_back(psi: PsiFn<'_>, p: &APoint, i: usize, eps: f64) -> Option<[f64; 3]> {
    let f = FIELDS[i];
    let d = (psi_at(psi, &flow(f, p, eps)) - psi_at(psi, &flow(f, p, -eps))) / (2.0 * eps);
    psi_at(psi, p)
        .try_inverse()
        .map(|inv| sl2_coords(&(inv * d)))
}

/// Deviation of the pushed-forward `(f̂1, f̂2)` from an orthonormal
/// horizontal pair for the metric making `(g1, g2)` orthonormal.
pub fn orthonormality_residual(psi: PsiFn<'_>, p: &APoint) -> f64 {
    let (Some(a), Some(b)) = (pulled_back(psi, p, 0, 1e-5), pulled_back(psi, p, 1, 1e-5)) else {
        return f64::NAN;
    };
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1];
    [
        dot(&a, &a) - 1.0,
        dot(&b, &b) - 1.0,
        dot(&a, &b),
        a[2],
        b[2],
    ]
    .iter()
    .fold(0.0, |m, v| max_nan(m, v.abs()))
}

/// Lie bracket of coordinate vector fields by central differences.
pub fn fd_bracket(
    x: impl Fn(&APoint) -> [f64; 3],
    y: impl Fn(&APoint) -> [f64; 3],
    p: &APoint,
    h: f64,
) -> [f64; 3] {
    let shift = |j: usize, s: f64| {
        let mut a = p.as_array();
        a[j] += s;
        APoint {
            x: a[0],
            y: a[1],
            z: a[2],
        }
    };
    let derivative = |f: &dyn Fn(&APoint) -> [f64; 3], v: [f64; 3]| -> [f64; 3] {
        let mut out = [0.0; 3];
        for j in 0..3 {
            let (fp, fm) = (f(&shift(j, h)), f(&shift(j, -h)));
            for k in 0..3 {
                out[k] += v[j] * (fp[k] - fm[k]) / (2.0 * h);
            }
        }
        out
    };
    let (xv, yv) = (x(p), y(p));
    let dy = derivative(&y, xv);
    let dx = derivative(&x, yv);
    std::array::from_fn(|k| dy[k] - dx[k])
}

/// `[f̂1,f0] = -f̂2`, `[f̂2,f0] = f̂1`, `[f̂2,f̂1] = f0` at `p`.
pub fn frame_bracket_residual(p: &APoint, h: f64) -> f64 {
    let (f1, f2) = frame_hat(p);
    let f0 = reeb(p);
    let cases = [
        (fd_bracket(fhat1, reeb, p, h), f2.map(|v| -v)),
        (fd_bracket(fhat2, reeb, p, h), f1),
        (fd_bracket(fhat2, fhat1, p, h), f0),
    ];
    cases.iter().fold(0.0, |m, (a, b)| {
        (0..3).fold(m, |m, k| max_nan(m, (a[k] - b[k]).abs()))
    })
}

/// `[g1,g0] = -g2`, `[g2,g0] = g1`, `[g2,g1] = g0`.
pub fn matrix_bracket_residual() -> f64 {
    let [g1, g2, g0] = sl2_generators();
    let br = |a: Matrix2<f64>, b: Matrix2<f64>| a * b - b * a;
    [
        (br(g1, g0) + g2).amax(),
        (br(g2, g0) - g1).amax(),
        (br(g2, g1) - g0).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Difference between `f̂` and the rotation by `z` of the left-invariant frame.
pub fn rotation_residual(p: &APoint) -> f64 {
    let (e1, e2) = frame(p);
    let (h1, h2) = frame_hat(p);
    let (s, c) = p.z.sin_cos();
    (0..3).fold(0.0, |m, k| {
        m.max((h1[k] - (c * e1[k] - s * e2[k])).abs())
            .max((h2[k] - (s * e1[k] + c * e2[k])).abs())
    })
}

/// Lattice points `F(0,0,2kπ) = (0,-1,-4kπ)`, `Ψ` maps them to the identity,
/// and they are central. Returns the largest residual.
pub fn quotient_residual(
    psi: PsiFn<'_>,
    ks: impl IntoIterator<Item = i32>,
    others: &[APoint],
) -> f64 {
    let mut r = 0.0f64;
    for k in ks {
        let c = APoint {
            x: 0.0,
            y: -1.0,
            z: -4.0 * PI * k as f64,
        };
        let f = map_f(0.0, 0.0, 2.0 * PI * k as f64);
        r = max_nan(
            r,
            (f.x - c.x)
                .abs()
                .max((f.y - c.y).abs())
                .max((f.z - c.z).abs()),
        );
        r = max_nan(r, (psi_at(psi, &c) - Matrix2::identity()).amax());
        for p in others {
            let (a, b) = (c.mul(p), p.mul(&c));
            r = max_nan(
                r,
                (a.x - b.x)
                    .abs()
                    .max((a.y - b.y).abs())
                    .max((a.z - b.z).abs()),
            );
        }
    }
    r
}

/// `quotient_residual` over `k_range`, with no central-ness samples, held to 1e-12.
pub fn quotient_check(psi: PsiFn<'_>, k_range: impl IntoIterator<Item = i32>) -> bool {
    quotient_residual(psi, k_range, &[]) <= 1e-12
}

/// `Ψ(1,0,0) = I` and the non-homomorphism product
/// `Ψ(√2/2, π/4, π) Ψ(√2/2, -π/4, -π) = [[2,0],[1/2,1/2]]`.
pub fn fixed_point_residual(psi: PsiFn<'_>) -> f64 {
    let at = |rho, theta, phi| psi(&PolarPoint { rho, theta, phi });
    let id = (at(1.0, 0.0, 0.0) - Matrix2::identity()).amax();
    let prod = at(SQRT_2 / 2.0, FRAC_PI_4, PI) * at(SQRT_2 / 2.0, -FRAC_PI_4, -PI);
    max_nan(id, (prod - Matrix2::new(2.0, 0.0, 0.5, 0.5)).amax())
}

/// Number of pairs on a `n^3` grid over `ρ ∈ [e^-2, e^2]`, `|θ| ≤ 1.5`,
/// `φ ∈ (-π, π]` whose images agree to `1e-8` while the preimages do not.
pub fn injectivity_collisions(psi: PsiFn<'_>, n: usize) -> usize {
    let lin = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1).max(1) as f64;
    let mut pts = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = PolarPoint {
                    rho: lin(-2.0, 2.0, i).exp(),
                    theta: lin(-1.5, 1.5, j),
                    phi: -PI + 2.0 * PI * (k + 1) as f64 / n as f64,
                };
                pts.push((p, psi(&p)));
            }
        }
    }
    pts.sort_by(|a, b| a.1[(0, 0)].total_cmp(&b.1[(0, 0)]));
    let tol = 1e-8;
    let mut collisions = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[j].1[(0, 0)] - pts[i].1[(0, 0)] > tol {
                break;
            }
            let (p, q) = (&pts[i].0, &pts[j].0);
            let same_image = (pts[i].1 - pts[j].1).amax() <= tol;
            let same_point = (p.rho - q.rho).abs() <= tol
                && (p.theta - q.theta).abs() <= tol
                && (p.phi - q.phi).abs() <= tol;
            if same_image && !same_point {
                collisions += 1;
            }
        }
    }
    collisions
}

fn random_point(rng: &mut ChaCha8Rng) -> APoint {
    APoint {
        x: rng.random_range(-2.0..2.0),
        y: rng.random_range(-3.0..-0.3),
        z: rng.random_range(-3.0..3.0),
    }
}

fn random_schedule(rng: &mut ChaCha8Rng, t: f64, segments: usize) -> Vec<ControlSegment> {
    (0..segments)
        .map(|_| ControlSegment {
            u: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
            duration: t / segments as f64,
        })
        .collect()
}

/// Sample counts for [`certify_isometry_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyPlan {
    pub consistency: usize,
    pub schedules: usize,
    pub points: usize,
    pub grid: usize,
}

impl CertifyPlan {
    /// The same count everywhere; zero runs the exact fixed-point checks only.
    pub fn uniform(samples: usize) -> Self {
        Self {
            consistency: samples,
            schedules: samples,
            points: samples,
            grid: if samples == 0 { 0 } else { 50 },
        }
    }
}

pub const NAGANO_STEPS: usize = 4000;
pub const PUSHFORWARD_EPS: f64 = 1e-3;
/// Allowed `|residual(eps) / residual(eps/2) - 2|`.
pub const PUSHFORWARD_ORDER_TOL: f64 = 0.05;

/// Runs every isometry check with `samples` random samples each.
pub fn certify_isometry(psi: PsiFn<'_>, samples: usize, seed: u64) -> Vec<CheckResult> {
    certify_isometry_with(psi, CertifyPlan::uniform(samples), seed)
}

pub fn certify_isometry_with(psi: PsiFn<'_>, plan: CertifyPlan, seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        CheckResult::new("psi_fixed_points", 2, fixed_point_residual(psi), 1e-12),
        CheckResult::new(
            "quotient_lattice",
            5,
            quotient_residual(psi, -2..=2, &[]),
            1e-12,
        ),
    ];
    if plan == CertifyPlan::uniform(0) {
        return out;
    }

    let pts: Vec<APoint> = (0..plan.points).map(|_| random_point(&mut rng)).collect();
    out.push(CheckResult::new(
        "quotient_check",
        5 * pts.len(),
        quotient_residual(psi, -2..=2, &pts),
        1e-12,
    ));

    let mut consistency = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut det_g = 0.0f64;
    for _ in 0..plan.consistency {
        let t1 = rng.random_range(-1.0..1.0);
        let t2 = rng.random_range(-3.0..3.0);
        let t0 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        consistency = max_nan(consistency, psi_consistency(psi, t1, t2, t0));
        let (a, b, c) = map_f_inv(&map_f(t1, t2, t0)).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        round_trip = max_nan(
            round_trip,
            (a - t1).abs().max((b - t2).abs()).max((c - t0).abs()),
        );
        det_g = max_nan(det_g, (map_g(t1, t2, t0).m.determinant() - 1.0).abs());
    }
    out.push(CheckResult::new(
        "psi_consistency",
        plan.consistency,
        consistency,
        1e-10,
    ));
    out.push(CheckResult::new(
        "f_round_trip",
        plan.consistency,
        round_trip,
        1e-10,
    ));
    out.push(CheckResult::new("det_g", plan.consistency, det_g, 1e-12));

    let mut nagano = 0.0f64;
    for _ in 0..plan.schedules {
        let schedule = random_schedule(&mut rng, 1.0, 4);
        nagano = max_nan(
            nagano,
            nagano_check(psi, &schedule, NAGANO_STEPS).unwrap_or(f64::NAN),
        );
    }
    out.push(CheckResult::new(
        "nagano_check",
        plan.schedules,
        nagano,
        1e-6,
    ));

    // First-order decay: residual(eps) / residual(eps/2) should be 2.
    let mut order = 0.0f64;
    for p in &pts {
        let r1 = pushforward_check(psi, p, PUSHFORWARD_EPS);
        let r2 = pushforward_check(psi, p, PUSHFORWARD_EPS / 2.0);
        order = max_nan(order, (r1 / r2 - 2.0).abs());
    }
    out.push(CheckResult::new(
        "pushforward_check",
        pts.len(),
        order,
        PUSHFORWARD_ORDER_TOL,
    ));
    out.push(CheckResult::new(
        "pushforward_identity",
        1,
        pushforward_check(psi, &APoint::IDENTITY, 1e-4),
        1e-3,
    ));

    let mut ortho = 0.0f64;
    let mut det_psi = 0.0f64;
    let mut fd = 0.0f64;
    let mut rotation = 0.0f64;
    for p in &pts {
        ortho = max_nan(ortho, orthonormality_residual(psi, p));
        det_psi = max_nan(det_psi, (psi_at(psi, p).determinant() - 1.0).abs());
        fd = max_nan(fd, frame_bracket_residual(p, 1e-4));
        rotation = max_nan(rotation, rotation_residual(p));
    }
    out.push(CheckResult::new(
        "orthonormality_transport",
        pts.len(),
        ortho,
        1e-6,
    ));
    out.push(CheckResult::new("det_psi", pts.len(), det_psi, 1e-10));
    out.push(CheckResult::new(
        "frame_hat_rotation",
        pts.len(),
        rotation,
        1e-12,
    ));
    out.push(CheckResult::new("frame_brackets_fd", pts.len(), fd, 1e-5));
    out.push(CheckResult::new(
        "matrix_brackets",
        3,
        matrix_bracket_residual(),
        1e-14,
    ));

    if plan.grid > 0 {
        let n = plan.grid;
        let collisions = injectivity_collisions(psi, n);
        out.push(CheckResult::new(
            "psi_injective",
            n * n * n,
            collisions as f64,
            0.0,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_examples() {
        assert_eq!(psi_consistency(&true_psi, 0.0, 0.0, 0.0), 0.0);
        let r = psi_consistency(&true_psi, 0.0, 0.0, FRAC_PI_4);
        assert!(r < 1e-15, "{r}");
    }

    #[test]
    fn zero_and_pure_vertical_controls() {
        let zero = [ControlSegment {
            u: [0.0; 3],
            duration: 1.0,
        }];
        assert_eq!(nagano_check(&true_psi, &zero, 100).unwrap(), 0.0);
        // q(T) = (0, -1, -u0 T), x(T) = rotation by u0 T / 2
        let u0 = 0.8;
        let vertical = [ControlSegment {
            u: [0.0, 0.0, u0],
            duration: 1.0,
        }];
        assert!(nagano_check(&true_psi, &vertical, 400).unwrap() < 1e-12);
        let (s, c) = (0.5 * u0).sin_cos();
        let image = true_psi(&PolarPoint {
            rho: 1.0,
            theta: 0.0,
            phi: -0.5 * u0,
        });
        assert!((image - Matrix2::new(c, -s, s, c)).amax() < 1e-15);
    }

    #[test]
    fn chart_exit_is_reported() {
        let long = [ControlSegment {
            u: [0.0, 0.0, 1.0],
            duration: 7.0,
        }];
        assert!(matches!(
            nagano_check(&true_psi, &long, 100),
            Err(Error::ChartExit(_))
        ));
    }

    #[test]
    fn pushforward_decays_linearly_at_identity() {
        let r = pushforward_check(&true_psi, &APoint::IDENTITY, 1e-4);
        // the second-order term is eps/2 * g_i^2 = eps/8 * I up to sign
        assert!((r - 1.25e-5).abs() < 1e-8, "{r}");
    }

    #[test]
    fn quotient() {
        assert!(quotient_check(&true_psi, -2..=2));
        assert!(quotient_check(&true_psi, [0]));
    }

    #[test]
    fn fd_bracket_of_coordinate_fields() {
        // [x ∂y, ∂x] = -∂y
        let p = APoint::IDENTITY;
        let b = fd_bracket(|p| [0.0, p.x, 0.0], |_| [1.0, 0.0, 0.0], &p, 1e-4);
        assert!((b[1] + 1.0).abs() < 1e-12 && b[0] == 0.0 && b[2] == 0.0);
    }

    #[test]
    fn all_checks_pass_for_true_psi() {
        let results = certify_isometry_with(
            &true_psi,
            CertifyPlan {
                consistency: 50,
                schedules: 5,
                points: 10,
                grid: 12,
            },
            7,
        );
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(results.len(), 15);
    }

    #[test]
    fn zero_samples_runs_fixed_points_only() {
        let r = certify_isometry(&true_psi, 0, 1);
        let names: Vec<_> = r.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["psi_fixed_points", "quotient_lattice"]);
    }
}
