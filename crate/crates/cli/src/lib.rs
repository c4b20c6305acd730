//! File format and report rendering for the `sr3d` command-line tool.

use std::fmt::Write as _;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sr3d::classify::{Classification, StructureLabel};
use sr3d::invariants::{bracket_form, canonical_angle, compute_chi, compute_kappa};
use sr3d::{FrameConstants, Invariants, LieAlgebra3, SRStructure, Tolerance, Vector3};

/// Failures of a command, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    NotContact(String),
    #[error("{0}")]
    Jacobi(String),
    #[error("{0}")]
    Numerical(String),
    #[error("certification failed: {}", .0.join(", "))]
    Certification(Vec<String>),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::NotContact(_) => 3,
            CliError::Jacobi(_) => 4,
            CliError::Numerical(_) => 5,
            CliError::Certification(_) => 6,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl From<sr3d::Error> for CliError {
    fn from(e: sr3d::Error) -> Self {
        use sr3d::Error as E;
        let msg = e.to_string();
        match e {
            E::NotContact => CliError::NotContact(msg),
            E::Jacobi { .. } => CliError::Jacobi(msg),
            E::NotAntisymmetric { .. }
            | E::NonFinite(_)
            | E::DependentGenerators
            | E::DegenerateGram { .. }
            | E::InvalidArgument(_) => CliError::Parse(msg),
            E::BlowUp { .. } | E::ChartExit(_) => CliError::Numerical(msg),
            E::InvalidFrame(_)
            | E::ChiZero { .. }
            | E::Unclassifiable(_)
            | E::RatioUndefined(_) => CliError::Other(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// A structure as stored on disk: sparse brackets `[e_i, e_j] = value e_k`,
/// two generators of the distribution in algebra coordinates, and their
/// Gram matrix (identity when omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default)]
    pub name: String,
    pub brackets: Vec<BracketEntry>,
    pub span: [[f64; 3]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coorientation: Option<[f64; 3]>,
}

impl StructureFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("invalid structure file: {e}")))
    }

    pub fn to_structure(&self) -> Result<SRStructure, CliError> {
        let entries: Vec<_> = self
            .brackets
            .iter()
            .map(|b| (b.i, b.j, b.k, b.value))
            .collect();
        let algebra = LieAlgebra3::from_brackets(&entries)?;
        let gram = match self.gram {
            Some([[a, b], [c, d]]) => Matrix2::new(a, b, c, d),
            None => Matrix2::identity(),
        };
        let span = self.span.map(Vector3::from);
        let s = SRStructure::new(algebra, span, gram)?;
        Ok(match self.coorientation {
            Some(w) => s.with_coorientation(Vector3::from(w))?,
            None => s,
        })
    }

    /// Nonzero brackets with `i < j`.
    pub fn from_structure(name: &str, s: &SRStructure) -> Self {
        let mut brackets = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                for k in 0..3 {
                    let value = s.algebra().c(i, j, k);
                    if value != 0.0 {
                        brackets.push(BracketEntry { i, j, k, value });
                    }
                }
            }
        }
        let g = s.gram();
        let gram =
            (*g != Matrix2::identity()).then(|| [[g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]]);
        let [v1, v2] = s.span();
        StructureFile {
            name: name.to_string(),
            brackets,
            span: [[v1.x, v1.y, v1.z], [v2.x, v2.y, v2.z]],
            gram,
            coorientation: s.coorientation().map(|w| [w.x, w.y, w.z]),
        }
    }
}

/// `-0` prints as `0`.
pub fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Six significant digits.
pub fn human(x: f64) -> String {
    let x = clean(x);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // The exponent after rounding, so 0.9999999 reads as 1.00000.
    let sci = format!("{x:.5e}");
    let magnitude: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if !(-4..6).contains(&magnitude) {
        sci
    } else {
        format!("{:.*}", (5 - magnitude).max(0) as usize, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pair {
    pub chi: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub name: String,
    pub algebra: String,
    pub raw: Pair,
    pub dilation: f64,
    pub normalized: Pair,
    pub frame_constants: FrameConstants,
    pub canonical_constants: Option<FrameConstants>,
    pub canonical_angle: Option<f64>,
    pub structural_residual: f64,
    pub case: String,
    pub label: String,
    pub isometry_class_id: String,
    pub note: Option<String>,
}

fn clean_constants(k: FrameConstants) -> FrameConstants {
    FrameConstants {
        c01_1: clean(k.c01_1),
        c01_2: clean(k.c01_2),
        c02_1: clean(k.c02_1),
        c02_2: clean(k.c02_2),
        c12_1: clean(k.c12_1),
        c12_2: clean(k.c12_2),
    }
}

impl ClassifyReport {
    pub fn new(name: &str, c: &Classification, tol: Tolerance) -> Self {
        Self {
            name: name.to_string(),
            algebra: c.frame.algebra.identify(tol).key().to_string(),
            raw: Pair {
                chi: clean(c.raw_chi),
                kappa: clean(c.raw_kappa),
            },
            dilation: c.invariants.dilation,
            normalized: Pair {
                chi: clean(c.label.chi),
                kappa: clean(c.label.kappa),
            },
            frame_constants: clean_constants(c.frame.constants),
            canonical_constants: c.canonical_constants.map(clean_constants),
            canonical_angle: c.canonical_angle,
            structural_residual: c.structural_residual,
            case: c.case.name().to_string(),
            label: c.label.algebra.key().to_string(),
            isometry_class_id: c.label.isometry_class_id.clone(),
            note: c.note().map(str::to_string),
        }
    }

    pub fn render(&self) -> String {
        let label = StructureLabel::from_key(&self.label)
            .map(|l| l.to_string())
            .unwrap_or_else(|| self.label.clone());
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "structure          {}", self.name);
        }
        let _ = writeln!(out, "algebra            {}", self.algebra);
        let _ = writeln!(
            out,
            "raw chi, kappa     {}, {}",
            human(self.raw.chi),
            human(self.raw.kappa)
        );
        let _ = writeln!(out, "dilation           {}", human(self.dilation));
        let _ = writeln!(
            out,
            "normalized         {}, {}",
            human(self.normalized.chi),
            human(self.normalized.kappa)
        );
        let _ = writeln!(
            out,
            "frame constants    {}",
            render_constants(&self.frame_constants)
        );
        if let Some(k) = &self.canonical_constants {
            let _ = writeln!(out, "canonical          {}", render_constants(k));
        }
        if let Some(theta) = self.canonical_angle {
            let _ = writeln!(out, "canonical angle    {}", human(theta));
            let _ = writeln!(
                out,
                "structural resid.  {}",
                human(self.structural_residual)
            );
        }
        let _ = writeln!(out, "case               {}", self.case);
        let _ = writeln!(out, "label              {label}");
        let _ = writeln!(out, "isometry class     {}", self.isometry_class_id);
        if let Some(note) = &self.note {
            let _ = writeln!(out, "note               {note}");
        }
        out
    }
}

pub fn render_constants(k: &FrameConstants) -> String {
    format!(
        "c01 = ({}, {})  c02 = ({}, {})  c12 = ({}, {})",
        human(k.c01_1),
        human(k.c01_2),
        human(k.c02_1),
        human(k.c02_2),
        human(k.c12_1),
        human(k.c12_2)
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantsReport {
    pub name: String,
    pub frame_constants: FrameConstants,
    pub bracket_form: [[f64; 2]; 2],
    pub raw: Pair,
    pub normalized: Invariants,
    pub canonical_angle: Option<f64>,
}

impl InvariantsReport {
    pub fn new(name: &str, s: &SRStructure, tol: Tolerance) -> Result<Self, CliError> {
        let frame = s.reeb_frame()?;
        let q = bracket_form(&frame).q;
        let (chi, kappa) = (compute_chi(&frame), compute_kappa(&frame));
        let normalized = Invariants::of_frame(&frame, tol);
        let chi_zero = tol.is_zero(chi, frame.tolerance_scale());
        Ok(Self {
            name: name.to_string(),
            frame_constants: clean_constants(frame.constants),
            bracket_form: [
                [clean(q[(0, 0)]), clean(q[(0, 1)])],
                [clean(q[(1, 0)]), clean(q[(1, 1)])],
            ],
            raw: Pair {
                chi: clean(chi),
                kappa: clean(kappa),
            },
            normalized: Invariants {
                chi: clean(normalized.chi),
                kappa: clean(normalized.kappa),
                dilation: normalized.dilation,
            },
            canonical_angle: (!chi_zero).then(|| canonical_angle(&frame.constants)),
        })
    }

    pub fn render(&self) -> String {
        let q = &self.bracket_form;
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "structure          {}", self.name);
        }
        let _ = writeln!(
            out,
            "frame constants    {}",
            render_constants(&self.frame_constants)
        );
        let _ = writeln!(
            out,
            "bracket form       [[{}, {}], [{}, {}]]",
            human(q[0][0]),
            human(q[0][1]),
            human(q[1][0]),
            human(q[1][1])
        );
        let _ = writeln!(out, "chi                {}", human(self.raw.chi));
        let _ = writeln!(out, "kappa              {}", human(self.raw.kappa));
        let _ = writeln!(
            out,
            "dilation           {}",
            human(self.normalized.dilation)
        );
        let _ = writeln!(
            out,
            "normalized         {}, {}",
            human(self.normalized.chi),
            human(self.normalized.kappa)
        );
        if let Some(theta) = self.canonical_angle {
            let _ = writeln!(out, "canonical angle    {}", human(theta));
        }
        out
    }
}
