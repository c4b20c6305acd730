//! Single-sign corruptions of `Ψ` and of the covector field, used to show
//! that the certification harnesses can fail.

use nalgebra::Matrix2;

use crate::frame::FrameConstants;
use crate::isometry::PolarPoint;

/// One sign flipped in `Ψ`. `cos(-φ)` is omitted since it is not a change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMutant {
    Entry00,
    Entry01,
    Entry10,
    Entry11,
    PhiInSin,
    ThetaInSin,
    PhiInSinDiff,
    ThetaInCos,
    PhiInCosDiff,
}

impl PsiMutant {
    pub const ALL: [PsiMutant; 9] = [
        PsiMutant::Entry00,
        PsiMutant::Entry01,
        PsiMutant::Entry10,
        PsiMutant::Entry11,
        PsiMutant::PhiInSin,
        PsiMutant::ThetaInSin,
        PsiMutant::PhiInSinDiff,
        PsiMutant::ThetaInCos,
        PsiMutant::PhiInCosDiff,
    ];

    pub fn apply(self, p: &PolarPoint) -> Matrix2<f64> {
        use PsiMutant::*;
        let s = |m: PsiMutant| if self == m { -1.0 } else { 1.0 };
        let PolarPoint { rho, theta, phi } = *p;
        let k = (rho * theta.cos()).sqrt().recip();
        Matrix2::new(
            s(Entry00) * k * phi.cos(),
            s(Entry01) * k * (s(PhiInSin) * phi).sin(),
            s(Entry10) * k * rho * (s(ThetaInSin) * theta - s(PhiInSinDiff) * phi).sin(),
            s(Entry11) * k * rho * (s(ThetaInCos) * theta - s(PhiInCosDiff) * phi).cos(),
        )
    }
}

/// One sign flipped in the covector field
/// `s = c12_1 h1 + c12_2 h2 + h0`, `(h2 s, -h1 s, (c01_1 h1 + c01_2 h2) h1 + (c02_1 h1 + c02_2 h2) h2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerticalMutant {
    SC12_1,
    SC12_2,
    SH0,
    Dh1,
    Dh2,
    C01_1,
    C01_2,
    C02_1,
    C02_2,
    FirstGroup,
    SecondGroup,
}

impl VerticalMutant {
    pub const ALL: [VerticalMutant; 11] = [
        VerticalMutant::SC12_1,
        VerticalMutant::SC12_2,
        VerticalMutant::SH0,
        VerticalMutant::Dh1,
        VerticalMutant::Dh2,
        VerticalMutant::C01_1,
        VerticalMutant::C01_2,
        VerticalMutant::C02_1,
        VerticalMutant::C02_2,
        VerticalMutant::FirstGroup,
        VerticalMutant::SecondGroup,
    ];

    pub fn apply(self, k: &FrameConstants, h: [f64; 3]) -> [f64; 3] {
        use VerticalMutant::*;
        let s = |m: VerticalMutant| if self == m { -1.0 } else { 1.0 };
        let [h1, h2, h0] = h;
        let sum = s(SC12_1) * k.c12_1 * h1 + s(SC12_2) * k.c12_2 * h2 + s(SH0) * h0;
        [
            s(Dh1) * h2 * sum,
            -s(Dh2) * h1 * sum,
            s(FirstGroup) * (s(C01_1) * k.c01_1 * h1 + s(C01_2) * k.c01_2 * h2) * h1
                + s(SecondGroup) * (s(C02_1) * k.c02_1 * h1 + s(C02_2) * k.c02_2 * h2) * h2,
        ]
    }
}
