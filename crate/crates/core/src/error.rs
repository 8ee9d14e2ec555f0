use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not inside the unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("net values are not {lipschitz}-Lipschitz: points {i} and {j} differ by {gap} at distance {distance}")]
    LipschitzViolation { i: usize, j: usize, gap: f64, distance: f64, lipschitz: f64 },

    #[error("Sarason bound hypothesis fails: need 0 < ε < 1, got ε = {0}")]
    SarasonHypothesis(f64),

    #[error("e^(f/t) fails the B₂ predicate at t = {0}")]
    NotB2(f64),

    #[error("lacunary exponents violate super-lacunarity: {0}")]
    NotSuperLacunary(String),

    #[error("weight grid: {0}")]
    Grid(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
