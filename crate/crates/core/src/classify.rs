//! Local isometry classification and the built-in catalog.
//!
//! The pipeline is: adapted frame, raw `(chi, kappa)`, dilation to the unit
//! circle (or the origin), then either the `chi = 0` rule (the class is
//! determined by `kappa` alone) or the canonical frame and a case split on
//! which canonical constants vanish.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraLabel, LieAlgebra3, Vector3};
use crate::frame::{AdaptedFrame, FrameConstants, SRStructure};
use crate::geodesics::ModelId;
use crate::invariants::{self, Invariants};
use crate::{Error, Result, Tolerance};

/// Algebra label of a classified structure: the algebra labels, with
/// `sl(2)` split by the type of the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureLabel {
    H3,
    APlusR,
    SolvPlus,
    SolvMinus,
    Se2,
    Sh2,
    /// `sl(2)` with the Killing form definite on the distribution.
    SlE2,
    /// `sl(2)` with the Killing form indefinite on the distribution.
    SlH2,
    Su2,
}

impl StructureLabel {
    pub const ALL: [StructureLabel; 9] = [
        StructureLabel::H3,
        StructureLabel::APlusR,
        StructureLabel::SolvPlus,
        StructureLabel::SolvMinus,
        StructureLabel::Se2,
        StructureLabel::Sh2,
        StructureLabel::SlE2,
        StructureLabel::SlH2,
        StructureLabel::Su2,
    ];

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.key() == key)
    }

    pub fn key(self) -> &'static str {
        match self {
            StructureLabel::H3 => "h3",
            StructureLabel::APlusR => "a_plus_r",
            StructureLabel::SolvPlus => "solv_plus",
            StructureLabel::SolvMinus => "solv_minus",
            StructureLabel::Se2 => "se2",
            StructureLabel::Sh2 => "sh2",
            StructureLabel::SlE2 => "sl_e2",
            StructureLabel::SlH2 => "sl_h2",
            StructureLabel::Su2 => "su2",
        }
    }

    pub fn algebra(self) -> AlgebraLabel {
        match self {
            StructureLabel::H3 => AlgebraLabel::H3,
            StructureLabel::APlusR => AlgebraLabel::APlusR,
            StructureLabel::SolvPlus => AlgebraLabel::SolvPlus,
            StructureLabel::SolvMinus => AlgebraLabel::SolvMinus,
            StructureLabel::Se2 => AlgebraLabel::Se2,
            StructureLabel::Sh2 => AlgebraLabel::Sh2,
            StructureLabel::SlE2 | StructureLabel::SlH2 => AlgebraLabel::Sl2,
            StructureLabel::Su2 => AlgebraLabel::Su2,
        }
    }
}

impl fmt::Display for StructureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureLabel::SlE2 => "sl_e(2)",
            StructureLabel::SlH2 => "sl_h(2)",
            other => return other.algebra().fmt(f),
        };
        f.write_str(s)
    }
}

/// Which branch of the decision procedure produced a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassCase {
    /// `chi = 0`: the class is fixed by the sign of `kappa`.
    ChiZero,
    /// `c12 = 0`, `c02_1 = 0`.
    IA,
    /// `c12 = 0`, `c01_2 = 0`.
    IB,
    /// `c12 = 0`, `c01_2 > 0 > c02_1`.
    IC,
    /// `c12 = 0`, `c01_2 < 0 < c02_1`.
    ID,
    /// `c12 = 0`, `c01_2, c02_1 > 0`.
    IE,
    /// `c12_1 = 0 != c12_2`, `c02_1 = 0`.
    II,
    /// `c12_2 = 0 != c12_1`, `c01_2 = 0`.
    III,
}

impl ClassCase {
    /// The case of a canonical frame whose constants have already been
    /// zero-snapped. `None` if no case applies, which for constants
    /// satisfying the structural equations with `chi > 0` cannot happen.
    pub fn of_canonical(k: &FrameConstants) -> Option<ClassCase> {
        let (a, b) = (k.c01_2, k.c02_1);
        match (k.c12_1 == 0.0, k.c12_2 == 0.0) {
            (true, true) => {
                if b == 0.0 && a != 0.0 {
                    Some(ClassCase::IA)
                } else if a == 0.0 && b != 0.0 {
                    Some(ClassCase::IB)
                } else if a > 0.0 && b < 0.0 {
                    Some(ClassCase::IC)
                } else if a < 0.0 && b > 0.0 {
                    Some(ClassCase::ID)
                } else if a > 0.0 && b > 0.0 {
                    Some(ClassCase::IE)
                } else {
                    None
                }
            }
            (true, false) if b == 0.0 && a != 0.0 => Some(ClassCase::II),
            (false, true) if a == 0.0 && b != 0.0 => Some(ClassCase::III),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassCase::ChiZero => "chi=0",
            ClassCase::IA => "(i)(a)",
            ClassCase::IB => "(i)(b)",
            ClassCase::IC => "(i)(c)",
            ClassCase::ID => "(i)(d)",
            ClassCase::IE => "(i)(e)",
            ClassCase::II => "(ii)",
            ClassCase::III => "(iii)",
        }
    }
}

impl fmt::Display for ClassCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub algebra: StructureLabel,
    pub chi: f64,
    pub kappa: f64,
    pub isometry_class_id: String,
}

impl ClassLabel {
    fn new(algebra: StructureLabel, chi: f64, kappa: f64) -> Self {
        let isometry_class_id = if chi == 0.0 {
            format!("chi0.kappa{}", kappa)
        } else {
            format!(
                "chi{:.6}.kappa{:.6}.{}",
                snap(chi, 1e-9),
                snap(kappa, 1e-9),
                algebra.key()
            )
        };
        Self {
            algebra,
            chi,
            kappa,
            isometry_class_id,
        }
    }
}

fn snap(x: f64, eps: f64) -> f64 {
    if x.abs() <= eps {
        0.0
    } else {
        x
    }
}

/// Everything computed on the way to a label.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub frame: AdaptedFrame,
    pub raw_chi: f64,
    pub raw_kappa: f64,
    pub invariants: Invariants,
    /// Canonical frame, dilated to the normalised scale (`chi > 0` only).
    pub canonical: Option<AdaptedFrame>,
    /// Rotation angle of the canonical frame (`chi > 0` only).
    pub canonical_angle: Option<f64>,
    /// Zero-snapped constants of the normalised canonical frame.
    pub canonical_constants: Option<FrameConstants>,
    /// `max(|c02_1 c12_2|, |c01_2 c12_1|)` on the canonical frame.
    pub structural_residual: f64,
    pub case: ClassCase,
    pub label: ClassLabel,
}

impl Classification {
    pub fn note(&self) -> Option<&'static str> {
        match self.label.algebra {
            StructureLabel::APlusR => Some("locally isometric to SL_e(2)"),
            StructureLabel::SlE2 if self.case == ClassCase::ChiZero => {
                Some("locally isometric to A+(R)xS^1")
            }
            _ => None,
        }
    }
}

/// Residual of the structural equations `c02_1 c12_2 = 0`,
/// `c01_2 c12_1 = 0` that hold on a canonical frame.
pub fn structural_residual(k: &FrameConstants) -> f64 {
    (k.c02_1 * k.c12_2).abs().max((k.c01_2 * k.c12_1).abs())
}

/// The Killing form restricted to the pair `(f1, f2)`.
pub fn killing_on_distribution(fr: &AdaptedFrame) -> Matrix2<f64> {
    let kf = fr.algebra.killing_form();
    let v = [fr.f1, fr.f2];
    Matrix2::from_fn(|i, j| v[i].dot(&(kf * v[j])))
}

fn killing_is_definite(fr: &AdaptedFrame, tol: Tolerance) -> bool {
    let m = killing_on_distribution(fr);
    let scale = m.amax().max(1e-300);
    let det = m.determinant();
    !tol.is_zero(det, scale * scale) && det > 0.0
}

pub fn classify(s: &SRStructure) -> Result<ClassLabel> {
    classify_with(s, Tolerance::default()).map(|c| c.label)
}

pub fn classify_with(s: &SRStructure, tol: Tolerance) -> Result<Classification> {
    let report = s.algebra().check_jacobi();
    if !report.passed {
        return Err(Error::Jacobi {
            residual: report.residual,
            tolerance: report.tolerance,
        });
    }
    let frame = s.reeb_frame()?;
    classify_frame(frame, tol)
}

/// Classification starting from an adapted frame.
pub fn classify_frame(frame: AdaptedFrame, tol: Tolerance) -> Result<Classification> {
    let scale = frame.tolerance_scale();
    let raw_chi = invariants::compute_chi(&frame);
    let raw_kappa = invariants::compute_kappa(&frame);
    let inv = Invariants::normalize(raw_chi, raw_kappa, tol, scale);
    let identified = frame.algebra.identify(tol);

    if tol.is_zero(raw_chi, scale) {
        let (algebra, kappa) = if inv.kappa == 0.0 {
            (StructureLabel::H3, 0.0)
        } else if inv.kappa > 0.0 {
            (StructureLabel::Su2, 1.0)
        } else {
            let label = match identified {
                AlgebraLabel::Sl2 => StructureLabel::SlE2,
                AlgebraLabel::APlusR => StructureLabel::APlusR,
                other => {
                    return Err(Error::Unclassifiable(format!(
                        "chi = 0, kappa < 0 on a {other} algebra"
                    )))
                }
            };
            (label, -1.0)
        };
        if algebra.algebra() != identified {
            return Err(Error::Unclassifiable(format!(
                "chi = 0, kappa = {} requires {}, algebra is {identified}",
                inv.kappa,
                algebra.algebra()
            )));
        }
        let invariants = Invariants {
            chi: 0.0,
            kappa,
            dilation: inv.dilation,
        };
        return Ok(Classification {
            frame,
            raw_chi,
            raw_kappa,
            invariants,
            canonical: None,
            canonical_angle: None,
            canonical_constants: None,
            structural_residual: 0.0,
            case: ClassCase::ChiZero,
            label: ClassLabel::new(algebra, 0.0, kappa),
        });
    }

    let (canonical, theta) = invariants::canonical_frame(&frame, tol)?;
    let canonical = canonical.dilate(inv.dilation)?;
    let cscale = canonical.tolerance_scale();
    let residual = structural_residual(&canonical.constants);
    if residual > 1e-9 * cscale * cscale {
        return Err(Error::Unclassifiable(format!(
            "structural equations fail on the canonical frame (residual {residual:e})"
        )));
    }
    let mut snapped = canonical.constants;
    for c in [
        &mut snapped.c01_1,
        &mut snapped.c01_2,
        &mut snapped.c02_1,
        &mut snapped.c02_2,
        &mut snapped.c12_1,
        &mut snapped.c12_2,
    ] {
        if tol.is_zero(*c, cscale) {
            *c = 0.0;
        }
    }
    let case = ClassCase::of_canonical(&snapped).ok_or_else(|| {
        Error::Unclassifiable(format!("no case matches canonical constants {snapped:?}"))
    })?;
    let algebra = match case {
        ClassCase::IA => StructureLabel::Se2,
        ClassCase::IB => StructureLabel::Sh2,
        ClassCase::IC => StructureLabel::Su2,
        ClassCase::ID | ClassCase::IE => {
            if killing_is_definite(&canonical, tol) {
                StructureLabel::SlE2
            } else {
                StructureLabel::SlH2
            }
        }
        ClassCase::II => StructureLabel::SolvPlus,
        ClassCase::III => StructureLabel::SolvMinus,
        ClassCase::ChiZero => unreachable!("chi > 0 branch"),
    };
    if algebra.algebra() != identified {
        return Err(Error::Unclassifiable(format!(
            "case {case} implies {}, algebra is {identified}",
            algebra.algebra()
        )));
    }
    Ok(Classification {
        frame,
        raw_chi,
        raw_kappa,
        invariants: inv,
        canonical: Some(canonical),
        canonical_angle: Some(theta),
        canonical_constants: Some(snapped),
        structural_residual: residual,
        case,
        label: ClassLabel::new(algebra, inv.chi, inv.kappa),
    })
}

/// `|2 tr(A)^2 / det(A) - (1 -+ kappa/chi)|` on a canonical frame, where `A`
/// is `ad f1` on `span{f0, f2}` (solv+) or `ad f2` on `span{f0, f1}` (solv-).
pub fn solvable_ratio_check(fr: &AdaptedFrame, label: StructureLabel) -> Result<f64> {
    let k = &fr.constants;
    let chi = invariants::chi(k);
    let kappa = invariants::kappa(k);
    let scale = fr.tolerance_scale();
    if chi <= 1e-9 * scale {
        return Err(Error::RatioUndefined(format!("chi = {chi:e}")));
    }
    // Columns are the images of (f0, f2) resp. (f0, f1).
    let (a, expected) = match label {
        StructureLabel::SolvPlus => (
            Matrix2::new(0.0, -1.0, k.c01_2, -k.c12_2),
            1.0 - kappa / chi,
        ),
        StructureLabel::SolvMinus => (Matrix2::new(0.0, 1.0, k.c02_1, k.c12_1), 1.0 + kappa / chi),
        other => {
            return Err(Error::RatioUndefined(format!(
                "ratio relation is defined for solv+ and solv-, not {other}"
            )))
        }
    };
    let det = a.determinant();
    if det.abs() <= 1e-9 * scale * scale {
        return Err(Error::RatioUndefined(format!("det A = {det:e}")));
    }
    let tr = a.trace();
    Ok((2.0 * tr * tr / det - expected).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub structure: SRStructure,
    pub expected: ClassLabel,
    pub model: Option<ModelId>,
}

fn e(i: usize) -> Vector3 {
    Vector3::ith(i, 1.0)
}

fn from_constants(k: FrameConstants) -> SRStructure {
    SRStructure::orthonormal(k.to_algebra(), e(0), e(1)).expect("frame basis is independent")
}

fn killing_gram(a: &LieAlgebra3, v1: &Vector3, v2: &Vector3, sign: f64) -> Matrix2<f64> {
    let kf = a.killing_form() * sign;
    let v = [v1, v2];
    Matrix2::from_fn(|i, j| v[i].dot(&(kf * v[j])))
}

fn consts(c01_2: f64, c02_1: f64, c12_1: f64, c12_2: f64) -> FrameConstants {
    FrameConstants {
        c01_2,
        c02_1,
        c12_1,
        c12_2,
        ..Default::default()
    }
}

/// The built-in structures, with exact small-integer data.
///
/// `chi = 0` entries are given on their standard algebras; `chi > 0`
/// entries are given directly by canonical-frame constants, on the algebra
/// whose basis is the frame.
pub fn catalog() -> Vec<CatalogEntry> {
    let inv_sqrt5 = 5f64.sqrt().recip();
    let entry = |name, structure, algebra, chi, kappa, model| CatalogEntry {
        name,
        structure,
        expected: ClassLabel::new(algebra, chi, kappa),
        model,
    };

    let su2 = LieAlgebra3::su2();
    let su2_gram = killing_gram(&su2, &e(0), &e(1), -1.0);
    let sl2 = LieAlgebra3::sl2();
    let sl2_gram = killing_gram(&sl2, &e(0), &e(1), 1.0);

    vec![
        entry(
            "h3",
            SRStructure::orthonormal(LieAlgebra3::heisenberg(), e(0), e(1)).unwrap(),
            StructureLabel::H3,
            0.0,
            0.0,
            Some(ModelId::Heisenberg),
        ),
        entry(
            "su2_killing",
            SRStructure::new(su2, [e(0), e(1)], su2_gram).unwrap(),
            StructureLabel::Su2,
            0.0,
            1.0,
            Some(ModelId::Su2),
        ),
        entry(
            "sle2_killing",
            SRStructure::new(sl2, [e(0), e(1)], sl2_gram).unwrap(),
            StructureLabel::SlE2,
            0.0,
            -1.0,
            Some(ModelId::Sl2),
        ),
        entry(
            "aplus",
            SRStructure::orthonormal(LieAlgebra3::a_plus_r(), e(1), e(0) + e(2)).unwrap(),
            StructureLabel::APlusR,
            0.0,
            -1.0,
            Some(ModelId::APlusR),
        ),
        entry(
            "se2",
            from_constants(consts(2.0, 0.0, 0.0, 0.0)),
            StructureLabel::Se2,
            FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
            None,
        ),
        entry(
            "sh2",
            from_constants(consts(0.0, 2.0, 0.0, 0.0)),
            StructureLabel::Sh2,
            FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
            None,
        ),
        entry(
            "solv_plus",
            from_constants(consts(2.0, 0.0, 0.0, 1.0)),
            StructureLabel::SolvPlus,
            1.0,
            0.0,
            None,
        ),
        entry(
            "solv_minus",
            from_constants(consts(0.0, 2.0, 1.0, 0.0)),
            StructureLabel::SolvMinus,
            inv_sqrt5,
            -2.0 * inv_sqrt5,
            None,
        ),
        entry(
            "slh2",
            from_constants(consts(1.0, 1.0, 0.0, 0.0)),
            StructureLabel::SlH2,
            1.0,
            0.0,
            None,
        ),
        entry(
            "sle2_chi",
            from_constants(consts(-1.0, 3.0, 0.0, 0.0)),
            StructureLabel::SlE2,
            inv_sqrt5,
            -2.0 * inv_sqrt5,
            None,
        ),
        entry(
            "su2_chi",
            from_constants(consts(3.0, -1.0, 0.0, 0.0)),
            StructureLabel::Su2,
            inv_sqrt5,
            2.0 * inv_sqrt5,
            None,
        ),
    ]
}

/// One row of the (kappa, chi) plot of the catalog.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure1Row {
    pub name: &'static str,
    pub kappa: f64,
    pub chi: f64,
}

pub fn figure1_data() -> Result<Vec<Figure1Row>> {
    catalog()
        .into_iter()
        .map(|entry| {
            let label = classify(&entry.structure)?;
            Ok(Figure1Row {
                name: entry.name,
                kappa: label.kappa,
                chi: label.chi,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_round_trip() {
        for entry in catalog() {
            let label = classify(&entry.structure).unwrap();
            assert_eq!(label.algebra, entry.expected.algebra, "{}", entry.name);
            assert_eq!(
                label.isometry_class_id, entry.expected.isometry_class_id,
                "{}",
                entry.name
            );
            assert!(
                (label.chi - entry.expected.chi).abs() <= 1e-12,
                "{}",
                entry.name
            );
            assert!(
                (label.kappa - entry.expected.kappa).abs() <= 1e-12,
                "{}",
                entry.name
            );
        }
    }

    #[test]
    fn chi_zero_ids() {
        let ids: Vec<_> = catalog()
            .into_iter()
            .map(|e| (e.name, e.expected.isometry_class_id))
            .collect();
        let id = |n: &str| ids.iter().find(|(m, _)| *m == n).unwrap().1.clone();
        assert_eq!(id("h3"), "chi0.kappa0");
        assert_eq!(id("su2_killing"), "chi0.kappa1");
        assert_eq!(id("aplus"), "chi0.kappa-1");
        assert_eq!(id("aplus"), id("sle2_killing"));
        assert_eq!(id("se2"), "chi0.707107.kappa0.707107.se2");
    }

    #[test]
    fn exactly_one_origin_entry() {
        let n = catalog()
            .iter()
            .filter(|e| e.expected.chi == 0.0 && e.expected.kappa == 0.0)
            .count();
        assert_eq!(n, 1);
    }

    #[test]
    fn unimodular_flags() {
        let tol = Tolerance::default();
        for entry in catalog() {
            let unimodular = entry.structure.algebra().is_unimodular(tol);
            assert_eq!(
                unimodular,
                entry.name != "aplus" && !entry.name.starts_with("solv"),
                "{}",
                entry.name
            );
        }
    }

    #[test]
    fn case_table_is_exclusive_and_complete() {
        // Sign table over (c01_2, c02_1) with c12 = 0: every pair with
        // chi = (c01_2 + c02_1)/2 > 0 lands in exactly one of (a)-(e).
        let vals = [-3.0, -1.0, 0.0, 1.0, 3.0];
        let mut seen = std::collections::HashSet::new();
        for a in vals {
            for b in vals {
                let k = consts(a, b, 0.0, 0.0);
                if a + b > 0.0 {
                    seen.insert(ClassCase::of_canonical(&k).expect("chi > 0 has a case"));
                }
            }
        }
        let expected: std::collections::HashSet<_> = [
            ClassCase::IA,
            ClassCase::IB,
            ClassCase::IC,
            ClassCase::ID,
            ClassCase::IE,
        ]
        .into_iter()
        .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn solvable_ratios() {
        let plus = AdaptedFrame::from_constants(consts(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(
            solvable_ratio_check(&plus, StructureLabel::SolvPlus).unwrap(),
            0.0
        );
        let minus = AdaptedFrame::from_constants(consts(0.0, 2.0, 1.0, 0.0)).unwrap();
        assert_eq!(
            solvable_ratio_check(&minus, StructureLabel::SolvMinus).unwrap(),
            0.0
        );
        // c12_2 = 0 degenerates to se(2): ratio 0 and kappa = chi.
        let se2 = AdaptedFrame::from_constants(consts(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(
            solvable_ratio_check(&se2, StructureLabel::SolvPlus).unwrap(),
            0.0
        );
        assert!(solvable_ratio_check(&se2, StructureLabel::Se2).is_err());
        let sh2 = AdaptedFrame::from_constants(consts(0.0, 2.0, 0.0, 0.0)).unwrap();
        assert!(solvable_ratio_check(&sh2, StructureLabel::SolvPlus).is_err());
    }

    #[test]
    fn figure1_rows() {
        let rows = figure1_data().unwrap();
        assert!(rows.len() >= 9);
        let h3 = rows.iter().find(|r| r.name == "h3").unwrap();
        assert_eq!((h3.kappa, h3.chi), (0.0, 0.0));
        let su2 = rows.iter().find(|r| r.name == "su2_killing").unwrap();
        assert_eq!((su2.kappa, su2.chi), (1.0, 0.0));
        for r in rows.iter().filter(|r| r.chi == 0.0) {
            assert!([-1.0, 0.0, 1.0].contains(&r.kappa));
        }
    }

    #[test]
    fn non_contact_is_an_error() {
        let s = SRStructure::orthonormal(LieAlgebra3::abelian(), e(0), e(1)).unwrap();
        assert_eq!(classify(&s), Err(Error::NotContact));
    }
}
