use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("degenerate directional measure: {0}")]
    DegenerateMeasure(String),
    #[error("lambda_hit requires connected set; use mc estimators")]
    Disconnected,
    #[error("window has zero hyperplane measure")]
    DegenerateWindow,
    #[error("window must have positive area")]
    NonPositiveArea,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("restriction window is not contained in the simulation window")]
    WindowNotContained,
    #[error("query set must be interior to the window")]
    QueryNotInterior,
    #[error("event cap of {0} exceeded; reduce time or window size")]
    EventCap(u64),
    #[error("query sets overlap")]
    Overlap,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
