use thiserror::Error;

/// Errors reported by simulation, profile construction and optimization.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register size must be at least 1 qubit")]
    EmptyRegister,

    #[error("{n} qubits exceeds the dense-simulation cap of {cap} qubits")]
    QubitCapExceeded { n: usize, cap: usize },

    #[error("oracle string has {oracle_bits} bits but the register has {state_qubits} qubits")]
    DimensionMismatch {
        state_qubits: usize,
        oracle_bits: usize,
    },

    #[error("oracle strings longer than 64 bits are not supported (got {0})")]
    OracleTooLong(usize),

    #[error("invalid oracle hex encoding {text:?} for {n} bits")]
    InvalidOracleHex { text: String, n: usize },

    #[error("oracle value {mask:#x} does not fit in {n} bits")]
    OracleOutOfRange { mask: u64, n: usize },

    #[error("amplitude profile spans shells 0..={max_shell} but the register has only {n} qubits")]
    ProfileTooWide { max_shell: usize, n: usize },

    #[error("amplitude profile must contain at least one entry")]
    EmptyProfile,

    #[error("amplitude for shell {shell} is not finite")]
    NonFiniteAmplitude { shell: usize },

    #[error(
        "amplitude profile squared norm {norm_sqr} deviates from 1 by more than {tolerance:e}"
    )]
    UnnormalizedProfile { norm_sqr: f64, tolerance: f64 },

    #[error("step profile requires 1 <= k <= n/2, got k={k}, n={n}")]
    StepWindowOutOfRange { k: usize, n: usize },

    #[error("query budget k={k} exceeds register size n={n}")]
    BudgetTooLarge { k: usize, n: usize },

    #[error("optimization requires a query budget of at least 1")]
    ZeroBudget,

    #[error("error tolerance must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
