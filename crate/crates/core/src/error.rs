use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(i64),
    #[error("negative density in segment [{r_lo}, {r_hi})")]
    NegativeDensity { r_lo: f64, r_hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("overlapping segments at r = {0}")]
    OverlappingSegments(f64),
    #[error("shell at r = {radius} lies inside the hard core of radius {core}")]
    ShellInsideCore { radius: f64, core: f64 },
    #[error("segment starting at r = {r_lo} lies inside the hard core of radius {core}")]
    SegmentInsideCore { r_lo: f64, core: f64 },
    #[error("radius b = {b} lies inside the hard core of radius {core}")]
    InsideCore { b: f64, core: f64 },
    #[error("truncation radius R = {r} must exceed {min}")]
    RadiusTooSmall { r: f64, min: f64 },
    #[error("shell at r = {0} is not a grid node")]
    ShellNotOnGrid(f64),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("profile must equal 1 on the hard core, found {0} at the core boundary")]
    ProfileNotOneOnCore(f64),
    #[error("ODE integration failed at r = {0}")]
    Integration(f64),
    #[error("linear system is singular")]
    Singular,
    #[error("truncation radius could not be made large enough (boundary flux {0:e})")]
    Truncation(f64),
    #[error("argument must be positive, got {0}")]
    NonPositive(f64),
    #[error("Monte Carlo configuration: {0}")]
    McConfig(String),
    #[error("could not parse potential spec: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
