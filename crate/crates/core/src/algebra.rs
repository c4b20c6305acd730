//! Structure constants of three-dimensional real Lie algebras.
//!
//! An algebra is stored as the full tensor `c[i][j][k]`, the `k`-th
//! coefficient of `[e_i, e_j]`. Antisymmetry is checked at construction and
//! never repaired silently; the Jacobi identity is a separate check because
//! some callers (frame constants typed in by hand, mutation tests) need to
//! hold tensors that are not Lie algebras.

use std::fmt;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerance};

/// An element of a 3D Lie algebra, in coordinates of the algebra's basis.
pub type Vector3 = nalgebra::Vector3<f64>;

pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Antisymmetry defect allowed at construction, relative to `1 + max|c|`.
const ANTISYMMETRY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra3 {
    c: Tensor3,
    labels: [String; 3],
}

/// Outcome of [`LieAlgebra3::check_jacobi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiReport {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Coarse isomorphism class of a 3D real Lie algebra, restricted to the
/// algebras that carry a contact left-invariant structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraLabel {
    H3,
    APlusR,
    SolvPlus,
    SolvMinus,
    Se2,
    Sh2,
    Sl2,
    Su2,
    Other,
}

impl AlgebraLabel {
    pub fn key(self) -> &'static str {
        match self {
            AlgebraLabel::H3 => "h3",
            AlgebraLabel::APlusR => "a_plus_r",
            AlgebraLabel::SolvPlus => "solv_plus",
            AlgebraLabel::SolvMinus => "solv_minus",
            AlgebraLabel::Se2 => "se2",
            AlgebraLabel::Sh2 => "sh2",
            AlgebraLabel::Sl2 => "sl2",
            AlgebraLabel::Su2 => "su2",
            AlgebraLabel::Other => "other",
        }
    }

    pub fn is_unimodular(self) -> bool {
        matches!(
            self,
            AlgebraLabel::H3
                | AlgebraLabel::Se2
                | AlgebraLabel::Sh2
                | AlgebraLabel::Sl2
                | AlgebraLabel::Su2
        )
    }
}

impl fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraLabel::H3 => "h3",
            AlgebraLabel::APlusR => "a(R)+R",
            AlgebraLabel::SolvPlus => "solv+",
            AlgebraLabel::SolvMinus => "solv-",
            AlgebraLabel::Se2 => "se(2)",
            AlgebraLabel::Sh2 => "sh(2)",
            AlgebraLabel::Sl2 => "sl(2)",
            AlgebraLabel::Su2 => "su(2)",
            AlgebraLabel::Other => "other",
        };
        f.write_str(s)
    }
}

fn default_labels() -> [String; 3] {
    ["e1".to_string(), "e2".to_string(), "e3".to_string()]
}

impl LieAlgebra3 {
    /// Build from a full tensor. Rejects tensors that are not antisymmetric
    /// in the first two indices or contain non-finite entries.
    pub fn new(c: Tensor3) -> Result<Self> {
        let mut max = 0.0f64;
        for plane in &c {
            for row in plane {
                for &v in row {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("structure constants"));
                    }
                    max = max.max(v.abs());
                }
            }
        }
        let slack = ANTISYMMETRY_SLACK * (1.0 + max);
        for i in 0..3 {
            for j in i..3 {
                for k in 0..3 {
                    let (a, b) = (c[i][j][k], c[j][i][k]);
                    if (a + b).abs() > slack {
                        return Err(Error::NotAntisymmetric { i, j, k, a, b });
                    }
                }
            }
        }
        Ok(Self {
            c,
            labels: default_labels(),
        })
    }

    /// Build from sparse entries `[e_i, e_j] += value * e_k`; the entry at
    /// `(j, i, k)` is filled in with the opposite sign. Entries with `i == j`
    /// or out-of-range indices are rejected, as are conflicting duplicates.
    pub fn from_brackets(entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = [[[0.0; 3]; 3]; 3];
        let mut seen = [[[false; 3]; 3]; 3];
        for &(i, j, k, v) in entries {
            if i > 2 || j > 2 || k > 2 {
                return Err(Error::InvalidArgument(format!(
                    "bracket index out of range: ({i}, {j}, {k})"
                )));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::NotAntisymmetric {
                        i,
                        j,
                        k,
                        a: v,
                        b: v,
                    });
                }
                continue;
            }
            let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
            let value = sign * v;
            if seen[lo][hi][k] && c[lo][hi][k] != value {
                return Err(Error::InvalidArgument(format!(
                    "conflicting values for [e{}, e{}] along e{}",
                    lo + 1,
                    hi + 1,
                    k + 1
                )));
            }
            seen[lo][hi][k] = true;
            c[lo][hi][k] = value;
            c[hi][lo][k] = -value;
        }
        Self::new(c)
    }

    pub fn with_labels(mut self, labels: [&str; 3]) -> Self {
        self.labels = labels.map(str::to_string);
        self
    }

    /// All brackets vanish.
    pub fn abelian() -> Self {
        Self::new([[[0.0; 3]; 3]; 3]).expect("zero tensor")
    }

    /// `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::from_brackets(&[(0, 1, 2, 1.0)]).expect("heisenberg constants")
    }

    /// `[e1, e2] = e3`, `[e2, e3] = e1`, `[e3, e1] = e2`.
    pub fn su2() -> Self {
        Self::from_brackets(&[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)])
            .expect("su2 constants")
    }

    /// The basis `g1 = diag(1,-1)/2`, `g2 = [[0,1],[1,0]]/2`,
    /// `g3 = [[0,1],[-1,0]]/2` of traceless 2x2 matrices:
    /// `[g1, g2] = g3`, `[g1, g3] = g2`, `[g2, g3] = -g1`.
    pub fn sl2() -> Self {
        Self::from_brackets(&[(0, 1, 2, 1.0), (0, 2, 1, 1.0), (1, 2, 0, -1.0)])
            .expect("sl2 constants")
            .with_labels(["g1", "g2", "g3"])
    }

    /// `[e1, e2] = e1`, `e3` central.
    pub fn a_plus_r() -> Self {
        Self::from_brackets(&[(0, 1, 0, 1.0)]).expect("a(R)+R constants")
    }

    #[inline]
    pub fn constants(&self) -> &Tensor3 {
        &self.c
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    pub fn labels(&self) -> &[String; 3] {
        &self.labels
    }

    /// Largest absolute structure constant.
    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `1 + max|c|`, the reference magnitude for relative zero tests.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs()
    }

    /// `[x, y]`, with `k`-th coefficient `sum_ij x_i y_j c[i][j][k]`.
    pub fn bracket(&self, x: &Vector3, y: &Vector3) -> Vector3 {
        let mut out = Vector3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    out[k] += w * self.c[i][j][k];
                }
            }
        }
        out
    }

    /// Matrix of `ad x = [x, .]` acting on coordinate columns.
    pub fn ad(&self, x: &Vector3) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for j in 0..3 {
            for k in 0..3 {
                m[(k, j)] = (0..3).map(|i| x[i] * self.c[i][j][k]).sum();
            }
        }
        m
    }

    fn basis_ad(&self, i: usize) -> Matrix3<f64> {
        self.ad(&Vector3::ith(i, 1.0))
    }

    /// Largest absolute Jacobi sum over all index quadruples.
    pub fn jacobi_residual(&self) -> f64 {
        let c = &self.c;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let s: f64 = (0..3)
                            .map(|m| {
                                c[i][j][m] * c[m][k][l]
                                    + c[j][k][m] * c[m][i][l]
                                    + c[k][i][m] * c[m][j][l]
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Jacobi check with tolerance `1e-12 (1 + max|c|)^2`; the residual is
    /// quadratic in the constants.
    pub fn check_jacobi(&self) -> JacobiReport {
        let residual = self.jacobi_residual();
        let tolerance = 1e-12 * self.scale().powi(2);
        JacobiReport {
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    /// Killing form `K[i][j] = tr(ad e_i ad e_j)`.
    pub fn killing_form(&self) -> Matrix3<f64> {
        let ads: [Matrix3<f64>; 3] = std::array::from_fn(|i| self.basis_ad(i));
        Matrix3::from_fn(|i, j| (ads[i] * ads[j]).trace())
    }

    /// `tr(ad e_i)` for the three basis vectors.
    pub fn ad_traces(&self) -> Vector3 {
        Vector3::from_fn(|i, _| (0..3).map(|k| self.c[i][k][k]).sum())
    }

    pub fn is_unimodular(&self, tol: Tolerance) -> bool {
        let scale = self.scale();
        self.ad_traces().iter().all(|t| tol.is_zero(*t, scale))
    }

    /// The algebra expressed in a new basis whose vectors are the columns of
    /// `basis` (in old coordinates). Vectors transform as `x' = basis^-1 x`
    /// and the Killing form congruently, `K' = basis^T K basis`.
    pub fn change_basis(&self, basis: &Matrix3<f64>) -> Result<Self> {
        let inv = basis
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("basis change is singular".into()))?;
        let cols: [Vector3; 3] = std::array::from_fn(|a| basis.column(a).into_owned());
        let mut c = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in (a + 1)..3 {
                let coords = inv * self.bracket(&cols[a], &cols[b]);
                for k in 0..3 {
                    c[a][b][k] = coords[k];
                    c[b][a][k] = -coords[k];
                }
            }
        }
        Ok(Self {
            c,
            labels: self.labels.clone(),
        })
    }

    /// Orthonormal basis (Euclidean in coordinates) of the derived algebra
    /// `[g, g]`, found from the singular values of the three independent
    /// brackets. Singular values below `tol * scale` count as zero.
    pub fn derived_algebra(&self, tol: Tolerance) -> Vec<Vector3> {
        let brackets = Matrix3::from_columns(&[
            self.bracket(&Vector3::x(), &Vector3::y()),
            self.bracket(&Vector3::x(), &Vector3::z()),
            self.bracket(&Vector3::y(), &Vector3::z()),
        ]);
        let svd = brackets.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let scale = self.scale();
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        order
            .into_iter()
            .filter(|&i| !tol.is_zero(svd.singular_values[i], scale))
            .map(|i| u.column(i).into_owned())
            .collect()
    }

    /// Identify the algebra from the dimension of its derived algebra,
    /// unimodularity, and the Killing signature. Never fails; returns
    /// [`AlgebraLabel::Other`] when nothing matches (e.g. the abelian algebra).
    pub fn identify(&self, tol: Tolerance) -> AlgebraLabel {
        let scale = self.scale();
        let derived = self.derived_algebra(tol);
        match derived.len() {
            1 => {
                if self.is_unimodular(tol) {
                    AlgebraLabel::H3
                } else {
                    AlgebraLabel::APlusR
                }
            }
            2 => {
                // [g,g] is an abelian ideal n; any e outside n acts on it by
                // A = ad e|n. Zero trace <=> unimodular, and sign(det A) does
                // not depend on the choice or scaling of e.
                let e = derived[0].cross(&derived[1]);
                let ad_e = self.ad(&e);
                let a = nalgebra::Matrix2::from_fn(|r, s| derived[r].dot(&(ad_e * derived[s])));
                let (trace, det) = (a.trace(), a.determinant());
                if tol.is_zero(det, scale * scale) {
                    return AlgebraLabel::Other;
                }
                match (tol.is_zero(trace, scale), det > 0.0) {
                    (true, true) => AlgebraLabel::Se2,
                    (true, false) => AlgebraLabel::Sh2,
                    (false, true) => AlgebraLabel::SolvPlus,
                    (false, false) => AlgebraLabel::SolvMinus,
                }
            }
            3 => {
                let eig = SymmetricEigen::new(self.killing_form()).eigenvalues;
                let s2 = scale * scale;
                if eig.iter().any(|&l| tol.is_zero(l, s2)) {
                    AlgebraLabel::Other
                } else if eig.iter().all(|&l| l < 0.0) {
                    AlgebraLabel::Su2
                } else {
                    AlgebraLabel::Sl2
                }
            }
            _ => AlgebraLabel::Other,
        }
    }
}
