use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed shape: {0}")]
    MalformedShape(String),
    #[error("point coincides with the star centre")]
    AtCentre,
    #[error("point lies outside the closed region")]
    Exterior,
    #[error("star centre certification failed: {0}")]
    Certification(String),
    #[error("shape carries no star-centre certificate")]
    MissingCertificate,
    #[error("point ({0}, {1}) lies outside the base square [-1,1]^2")]
    OutsideSquare(f64, f64),
    #[error("boundary map inconsistent: {0}")]
    BoundaryMap(String),
    #[error("construction inconsistent: {0}")]
    Construction(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("log-domain regime violated: {0}")]
    Regime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
