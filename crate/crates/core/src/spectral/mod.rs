//! Equivariant spectra, their zeta functions and the derived determinants and torsions.

mod models;
mod special;
mod spectrum;
mod sum;
mod zeta;

use thiserror::Error;

use crate::ErrorKind;

pub use models::{build_model_spectrum, build_model_spectrum_for_tolerance, ModelSpec, TorusCharacter};
pub use special::{e1, gamma, ln_gamma, upper_gamma, EULER_GAMMA};
pub use spectrum::{Curve, CurveData, EquivariantSpectrum, HeatTail, Part, SpectrumEntry, TwistedTail};
pub use sum::NeumaierSum;
pub use zeta::{
    borcherds_report, curve_determinant, dolbeault_zeta, dolbeault_zeta_value, equivariant_determinant,
    equivariant_torsion, tau_iota, zeta_part, zeta_part_alternate, zeta_signed, zeta_total, zeta_value,
    BorcherdsReport, CurveReport, DeterminantReport, TauReport, TorsionReport, ZetaOptions, ZetaReport, ZetaValue,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("requested accuracy {requested:e} not reached; best error bound {achievable:e}")]
    Accuracy { requested: f64, achievable: f64 },
    #[error("inconsistent data: {0}")]
    Consistency(String),
}

impl SpectralError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Self::Input(_) => ErrorKind::Input,
            Self::Accuracy { .. } => ErrorKind::Accuracy,
            Self::Consistency(_) => ErrorKind::Geometry,
        }
    }
}
