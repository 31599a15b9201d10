use thiserror::Error;

use crate::cocycle::CocycleError;
use crate::greenm::GreenError;
use crate::model::ModelError;
use crate::spectrum::SpectrumError;
use crate::verify::VerifyError;

/// Crate-level error, one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}
