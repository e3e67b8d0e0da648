use thiserror::Error;

use crate::gerbe::ExtensionError;
use crate::stackyfan::FanDiagnostic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("homomorphism is not well defined: {0}")]
    IllDefinedHom(String),

    #[error("groups do not match: {0}")]
    GroupMismatch(String),

    #[error("invalid stacky fan: {}", join_diagnostics(.0))]
    InvalidFan(Vec<FanDiagnostic>),

    #[error("invalid extension: {0}")]
    InvalidExtension(ExtensionError),

    #[error("{n} vertices exceeds the configured bound of {max}")]
    SizeBound { n: usize, max: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn join_diagnostics(diags: &[FanDiagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
