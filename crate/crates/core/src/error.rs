use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error("cannot normalize a state with norm {0:e}")]
    ZeroNorm(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mass must be positive, got {0}")]
    NonpositiveMass(f64),
    #[error("state support truncated by the grid: tail mass {tail:e} outside [{p_min}, {p_max}]")]
    TruncatedSupport { tail: f64, p_min: f64, p_max: f64 },
    #[error("grid too small for oscillator level {n_max}: tail mass {tail:e}")]
    GridTooSmall { n_max: usize, tail: f64 },
    #[error("coherent expansion truncated at n_max = {n_max} leaves tail mass {tail:e}")]
    TruncationTooSevere { n_max: usize, tail: f64 },
    #[error("symmetrized coherent combination vanishes (norm {0:e})")]
    DegenerateCombo(f64),
    #[error("state poorly represented in the oscillator basis: residual {0:e}")]
    PoorRepresentation(f64),
    #[error("fermionic pair is degenerate: 1 - |<a|b>|^2 = {0:e}")]
    FermionicStateDegenerate(f64),
    #[error("relative wavefunction parity does not match {statistics} statistics (defect {defect:e})")]
    ParityMismatch { statistics: &'static str, defect: f64 },
    #[error("combination points fall outside the source grids: {0}")]
    CoverageError(String),
    #[error("time window does not contain all arrivals: boundary/peak = {0:e}")]
    WindowTooSmall(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
