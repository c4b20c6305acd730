//! Exit criteria. Each test prints one `criterion N: PASS|FAIL` line with
//! the measured quantities and then asserts the same condition.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{Matrix2, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sr3d::classify::{classify_with, solvable_ratio_check, StructureLabel};
use sr3d::geodesics::certify::{certify_vertical, conservation, generic_model, rk4_order_ratio};
use sr3d::geodesics::{integrate_geodesic, vertical_rhs, GeodesicState, GroupModel, ModelId};
use sr3d::invariants::{compute_chi, compute_kappa};
use sr3d::isometry::certify::{
    certify_isometry, certify_isometry_with, quotient_residual, true_psi, CertifyPlan,
};
use sr3d::isometry::{map_f, APoint};
use sr3d::mutation::{PsiMutant, VerticalMutant};
use sr3d::{catalog, classify, AdaptedFrame, FrameConstants, SRStructure, Tolerance};

fn report(n: u32, passed: bool, what: &str, detail: String) {
    println!(
        "criterion {n}: {} {what}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

/// A basis change with condition number at most 10.
fn random_basis(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    loop {
        let b = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0)) + Matrix3::identity();
        let sv = b.singular_values();
        if sv.min() > 0.1 && sv.max() / sv.min() < 10.0 {
            return b;
        }
    }
}

/// A rotation composed with a random invertible rescaling of the generators.
fn random_presentation(rng: &mut ChaCha8Rng) -> Matrix2<f64> {
    let (s, c) = rng.random_range(0.0..2.0 * PI).sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    loop {
        let m = Matrix2::from_fn(|_, _| rng.random_range(-1.0..1.0)) + Matrix2::identity();
        let sv = m.singular_values();
        if sv.min() > 0.2 && sv.max() / sv.min() < 5.0 {
            return rot * m;
        }
    }
}

/// The same structure written in another algebra basis and with another
/// pair of generators for the distribution.
fn re_present(s: &SRStructure, b: &Matrix3<f64>, m: &Matrix2<f64>) -> SRStructure {
    let algebra = s.algebra().change_basis(b).unwrap();
    let inv = b.try_inverse().unwrap();
    let [v1, v2] = s.span();
    let (w1, w2) = (inv * v1, inv * v2);
    let span = [
        w1 * m[(0, 0)] + w2 * m[(1, 0)],
        w1 * m[(0, 1)] + w2 * m[(1, 1)],
    ];
    SRStructure::new(algebra, span, m.transpose() * s.gram() * m).unwrap()
}

#[test]
fn criterion_1_invariant_values() {
    let start = Instant::now();
    let labels: Vec<_> = catalog()
        .into_iter()
        .map(|e| (e.name, classify(&e.structure).unwrap()))
        .collect();
    let elapsed = start.elapsed();
    let get = |name: &str| &labels.iter().find(|(n, _)| *n == name).unwrap().1;
    let tol = 1e-12;
    let pair = |name: &str, chi: f64, kappa: f64| {
        let l = get(name);
        (l.chi - chi).abs().max((l.kappa - kappa).abs())
    };
    let checks = [
        ("h3 -> (0,0)", pair("h3", 0.0, 0.0)),
        ("su2 Killing -> (0,1)", pair("su2_killing", 0.0, 1.0)),
        ("sl_e2 Killing -> (0,-1)", pair("sle2_killing", 0.0, -1.0)),
        ("A+ -> (0,-1)", pair("aplus", 0.0, -1.0)),
        ("se2 chi = kappa", (get("se2").chi - get("se2").kappa).abs()),
        (
            "sh2 chi = -kappa",
            (get("sh2").chi + get("sh2").kappa).abs(),
        ),
    ];
    let worst = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    let in_time = elapsed < Duration::from_secs(1);
    let passed = worst <= tol && in_time;
    report(
        1,
        passed,
        "catalog invariant pairs",
        format!("max deviation {worst:.3e} (tol {tol:e}), runtime {elapsed:?} (< 1 s)"),
    );
    for (what, dev) in checks {
        assert!(dev <= tol, "{what}: {dev:e}");
    }
    assert!(in_time);
}

#[test]
fn criterion_2_classification_stability() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = Tolerance::default();
    let mut mismatches = Vec::new();
    let mut worst_structural = 0.0f64;
    let mut trials = 0;
    for entry in catalog() {
        for _ in 0..100 {
            let b = random_basis(&mut rng);
            let m = random_presentation(&mut rng);
            let s = re_present(&entry.structure, &b, &m);
            trials += 1;
            match classify_with(&s, tol) {
                Ok(c) => {
                    if c.label.algebra != entry.expected.algebra
                        || c.label.isometry_class_id != entry.expected.isometry_class_id
                    {
                        mismatches.push(format!("{}: {:?}", entry.name, c.label));
                    }
                    worst_structural = worst_structural.max(c.structural_residual);
                }
                Err(e) => mismatches.push(format!("{}: {e}", entry.name)),
            }
        }
    }
    let elapsed = start.elapsed();
    let passed =
        mismatches.is_empty() && worst_structural <= 1e-9 && elapsed < Duration::from_secs(10);
    report(
        2,
        passed,
        "labels stable under basis changes and frame rotations",
        format!(
            "{trials} trials, {} mismatches, structural residual {worst_structural:.3e} (tol 1e-9), runtime {elapsed:?} (< 10 s)",
            mismatches.len()
        ),
    );
    assert!(mismatches.is_empty(), "{mismatches:?}");
    assert!(worst_structural <= 1e-9);
    assert!(elapsed < Duration::from_secs(10));
}

#[test]
fn criterion_3_solvable_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = Tolerance::default();
    let ratio_of = |s: &SRStructure, expected: StructureLabel| -> f64 {
        let c = classify_with(s, tol).unwrap();
        assert_eq!(c.label.algebra, expected);
        solvable_ratio_check(c.canonical.as_ref().unwrap(), expected).unwrap()
    };
    let mut worst = 0.0f64;
    let mut count = 0;
    for entry in catalog() {
        if matches!(
            entry.expected.algebra,
            StructureLabel::SolvPlus | StructureLabel::SolvMinus
        ) {
            worst = worst.max(ratio_of(&entry.structure, entry.expected.algebra));
            count += 1;
        }
    }
    for i in 0..50 {
        let a = rng.random_range(0.2..5.0);
        let c12 = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (k, label) = if i % 2 == 0 {
            let k = FrameConstants {
                c01_2: a,
                c12_2: c12,
                ..Default::default()
            };
            (k, StructureLabel::SolvPlus)
        } else {
            let k = FrameConstants {
                c02_1: a,
                c12_1: c12,
                ..Default::default()
            };
            (k, StructureLabel::SolvMinus)
        };
        let frame = AdaptedFrame::from_constants(k).unwrap();
        let base = SRStructure::orthonormal(frame.algebra.clone(), frame.f1, frame.f2).unwrap();
        let s = re_present(
            &base,
            &random_basis(&mut rng),
            &random_presentation(&mut rng),
        );
        worst = worst.max(ratio_of(&s, label));
        count += 1;
    }
    let passed = worst <= 1e-10;
    report(
        3,
        passed,
        "trace/determinant relations on solvable structures",
        format!("{count} structures, max residual {worst:.3e} (tol 1e-10)"),
    );
    assert!(passed);
}

#[test]
fn criterion_4_dilation_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut count = 0;
    for entry in catalog() {
        let frame = entry.structure.reeb_frame().unwrap();
        let (chi, kappa) = (compute_chi(&frame), compute_kappa(&frame));
        let size = chi.abs().max(kappa.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..20 {
            let lambda: f64 = rng.random_range(0.1..10.0);
            let l2 = lambda * lambda;
            let dilated = frame.dilate(lambda).unwrap();
            // the same dilation as a rescaled metric
            let s = &entry.structure;
            let rescaled = SRStructure::new(s.algebra().clone(), *s.span(), s.gram() / l2)
                .unwrap()
                .reeb_frame()
                .unwrap();
            for f in [&dilated, &rescaled] {
                let dev = (compute_chi(f) - l2 * chi)
                    .abs()
                    .max((compute_kappa(f) - l2 * kappa).abs());
                worst = worst.max(dev / (l2 * size));
                count += 1;
            }
        }
    }
    let passed = worst <= 1e-10;
    report(
        4,
        passed,
        "(chi, kappa) scale by lambda^2 under dilation",
        format!("{count} dilations, max relative deviation {worst:.3e} (tol 1e-10)"),
    );
    assert!(passed);
}

#[test]
fn criterion_5_geodesic_conservation() {
    const T: f64 = 5.0;
    const STEPS: usize = 5000;
    let h = [0.6, 0.8, 0.7];
    let mut energy = 0.0f64;
    let mut defect = 0.0f64;
    let mut ratios = Vec::new();
    for id in ModelId::ALL {
        for model in [GroupModel::standard(id), generic_model(id)] {
            let (e, d) = conservation(&model, h, T, STEPS, &vertical_rhs).unwrap();
            energy = energy.max(e);
            defect = defect.max(d);
            ratios.push((
                id,
                rk4_order_ratio(&model, h, T, 100, &vertical_rhs).unwrap(),
            ));
        }
    }
    let order_ok = ratios.iter().all(|(_, r)| (r - 16.0).abs() <= 0.2 * 16.0);
    let passed = energy <= 1e-9 && defect <= 1e-8 && order_ok;
    let shown: Vec<String> = ratios
        .iter()
        .map(|(id, r)| format!("{id} {r:.2}"))
        .collect();
    report(
        5,
        passed,
        "Hamiltonian and group-manifold conservation, RK4 order",
        format!(
            "energy drift {energy:.3e} (tol 1e-9), manifold defect {defect:.3e} (tol 1e-8), step-halving ratios [{}] (16 +- 20%)",
            shown.join(", ")
        ),
    );
    assert!(energy <= 1e-9);
    assert!(defect <= 1e-8);
    assert!(order_ok, "{ratios:?}");
}

#[test]
fn criterion_6_heisenberg_closed_form() {
    // Stated target: (h1, h2)(t) = (cos h0 t, sin h0 t) for unit initial data.
    let model = GroupModel::standard(ModelId::Heisenberg);
    let h0 = 1.3;
    let traj = integrate_geodesic(
        &model,
        &GeodesicState::at_identity(&model, [1.0, 0.0, h0]),
        2.0,
        2000,
    )
    .unwrap();
    let closed_form = traj.states.iter().fold(0.0f64, |m, s| {
        let (sn, cs) = (h0 * s.t).sin_cos();
        m.max((s.h[0] - cs).abs()).max((s.h[1] - sn).abs())
    });

    let straight = integrate_geodesic(
        &model,
        &GeodesicState::at_identity(&model, [1.0, 0.0, 0.0]),
        1.0,
        1000,
    )
    .unwrap();
    let endpoint = straight.last().g.distance(&model.generators[0].exp());

    let passed = closed_form <= 1e-9 && endpoint <= 1e-10;
    report(
        6,
        passed,
        "Heisenberg vertical closed form (cos h0 t, sin h0 t) and straight geodesic",
        format!(
            "closed-form deviation {closed_form:.3e} (tol 1e-9), exp(A1) endpoint {endpoint:.3e} (tol 1e-10)"
        ),
    );
    assert!(endpoint <= 1e-10);
    assert!(
        closed_form <= 1e-9,
        "vertical subsystem deviates from (cos, sin) by {closed_form:e}"
    );
}

#[test]
fn criterion_7_isometry_certification() {
    let start = Instant::now();
    let plan = CertifyPlan {
        consistency: 1000,
        schedules: 50,
        points: 20,
        grid: 50,
    };
    let results = certify_isometry_with(&true_psi, plan, 7);
    let elapsed = start.elapsed();
    print!("{}", sr3d::check::render_table(&results));
    let failed: Vec<_> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.clone())
        .collect();
    let in_time = elapsed < Duration::from_secs(60);
    let passed = failed.is_empty() && in_time;
    report(
        7,
        passed,
        "isometry certification",
        format!(
            "{} checks, failed {failed:?}, runtime {elapsed:?} (< 60 s)",
            results.len()
        ),
    );
    assert!(failed.is_empty(), "{failed:?}");
    assert!(in_time);
}

#[test]
fn criterion_8_normal_subgroup() {
    let mut worst = 0.0f64;
    for k in -2..=2 {
        let p = map_f(0.0, 0.0, 2.0 * PI * k as f64);
        let z = -4.0 * PI * k as f64;
        worst = worst
            .max(p.x.abs())
            .max((p.y + 1.0).abs())
            .max((p.z - z).abs());
    }
    let lattice = quotient_residual(&true_psi, -2..=2, &[]);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = true;
    for _ in 0..100 {
        let p = APoint::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..-0.01),
            rng.random_range(-10.0..10.0),
        )
        .unwrap();
        for k in -2..=2 {
            let c = APoint::new(0.0, -1.0, -4.0 * PI * k as f64).unwrap();
            exact &= c.mul(&p) == p.mul(&c);
        }
    }
    let passed = worst <= 1e-12 && lattice <= 1e-12 && exact;
    report(
        8,
        passed,
        "F(0,0,2k pi) = (0,-1,-4k pi), image is the identity, centrality",
        format!(
            "F deviation {worst:.3e}, Psi deviation {lattice:.3e} (tol 1e-12), centrality exact: {exact}"
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_9_mutation_sensitivity() {
    let control_isometry = certify_isometry(&true_psi, 20, 9).iter().all(|r| r.passed);
    let control_vertical = certify_vertical(&vertical_rhs)
        .unwrap()
        .iter()
        .all(|r| r.passed);

    let mut undetected = Vec::new();
    for m in PsiMutant::ALL {
        let psi = move |p: &sr3d::isometry::PolarPoint| m.apply(p);
        if certify_isometry(&psi, 20, 9).iter().all(|r| r.passed) {
            undetected.push(format!("{m:?}"));
        }
    }
    for m in VerticalMutant::ALL {
        let rhs = move |k: &FrameConstants, h: [f64; 3]| m.apply(k, h);
        let caught = match certify_vertical(&rhs) {
            Ok(r) => r.iter().any(|c| !c.passed),
            Err(_) => true,
        };
        if !caught {
            undetected.push(format!("{m:?}"));
        }
    }
    let total = PsiMutant::ALL.len() + VerticalMutant::ALL.len();
    let passed = control_isometry && control_vertical && undetected.is_empty();
    report(
        9,
        passed,
        "single sign flips are detected",
        format!(
            "{}/{total} mutants caught, unmutated harnesses pass: {}",
            total - undetected.len(),
            control_isometry && control_vertical
        ),
    );
    assert!(control_isometry && control_vertical);
    assert!(undetected.is_empty(), "{undetected:?}");
}
