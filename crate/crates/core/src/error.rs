use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum GeoError {
    #[error("dimension n = {0} outside the supported range 3..=7")]
    Dimension(usize),
    #[error("radius {r} is not inside the domain (r > {r_min})")]
    Domain { r: f64, r_min: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("singular flow at t = {t}: u = {u}")]
    SingularFlow { t: f64, u: f64 },
    #[error("time step starved at t = {t} (dt = {dt:e})")]
    Stiffness { t: f64, dt: f64 },
    #[error("quadrature did not converge: relative change {change:e} on node doubling")]
    Resolution { change: f64 },
    #[error("malformed table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GeoError> = std::result::Result<T, E>;
