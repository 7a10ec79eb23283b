use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("dimension mismatch: h0 is {h0}x{h0}, h1 is {h1}x{h1}")]
    DimensionMismatch { h0: usize, h1: usize },
    #[error("family dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("degenerate two-level family: {0}")]
    Degenerate(&'static str),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("complex angle diverges at the exceptional point (|R| = {radius:e} below {threshold:e})")]
    DivergentAtEp { radius: f64, threshold: f64 },
    #[error("non-finite complex angle")]
    NonFinite,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigenvalue iteration did not converge for indices {indices:?}")]
    NoConvergence { indices: Vec<usize> },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("eigenvector pair {index} is near-defective (|<left|right>| = {overlap:e}); the matrix is close to an exceptional point")]
    NearDefective { index: usize, overlap: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocatorError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("discriminant vanishes identically; the family is degenerate for all lambda")]
    IdenticallyZero,
    #[error("discriminant interpolation is ill-conditioned (condition estimate {condition:e}, aliasing residual {aliasing:e})")]
    IllConditioned { condition: f64, aliasing: f64 },
    #[error("polynomial root finder did not converge after {iterations} iterations")]
    RootFinder { iterations: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Locator(#[from] LocatorError),
    #[error("exceptional point too close to contour near lambda = {re} + {im}i")]
    EpTooClose { re: f64, im: f64 },
    #[error("contour passes within {distance:e} of the exceptional point at {re} + {im}i (exclusion radius {radius:e})")]
    ContourNearEp { re: f64, im: f64, distance: f64, radius: f64 },
    #[error("monodromy requires a closed contour")]
    NotClosed,
    #[error("branch matching collision: end branches {first} and {second} both map to start level {target}")]
    MatchingCollision { first: usize, second: usize, target: usize },
    #[error("contours do not share endpoints")]
    EndpointMismatch,
    #[error("endpoint overlap for branch {branch} is ambiguous (largest |overlap| = {largest})")]
    AmbiguousOverlap { branch: usize, largest: f64 },
    #[error("invalid branch subset: {0}")]
    InvalidSubset(String),
}
