use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a valid density matrix: {0}")]
    NotAState(String),
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("exponent {0} outside [0, 1]")]
    BadExponent(f64),
    #[error("probability {0} outside its allowed range")]
    BadProbability(f64),
    #[error("{what} needs {requested} spins, above the dense cap of {cap}")]
    TooLarge {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("invalid scenario: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("environment is empty")]
    EmptyEnvironment,
    #[error("closed form requires omega = 0, got {0}")]
    FieldPresent(f64),
    #[error("information deficit {0} outside (0, 1)")]
    BadDelta(f64),
    #[error("system is trivially classical (p_up = {0})")]
    TrivialSystem(f64),
    #[error("environment carries no information about the system")]
    ZeroInformation,
    #[error("spin {0} is mixed (a = {1}); this path requires a pure environment")]
    MixedEnvironment(usize, f64),
    #[error("system is not in its pure default state (coherence {0})")]
    MixedSystem(f64),
    #[error("C({n}, {k}) = {count} subsets exceeds the enumeration limit {limit}")]
    TooManySubsets {
        n: usize,
        k: usize,
        count: f64,
        limit: f64,
    },
    #[error("bad fragment selection: {0}")]
    BadFragment(String),
    #[error("haziness {0} outside [0, 1)")]
    BadHaziness(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
