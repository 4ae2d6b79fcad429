use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("subsystem `{label}` has dimension {dim}; at least 2 is required")]
    InvalidDimension { label: String, dim: usize },
    #[error("index {index} out of range for subsystem `{label}` of dimension {dim}")]
    IndexOutOfRange { label: String, index: usize, dim: usize },
    #[error("subsystem `{0}` has no basis assignment")]
    MissingAssignment(String),
    #[error("layouts differ")]
    LayoutMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("total dimension {dim} exceeds oracle cap {cap}")]
    OracleCapExceeded { dim: usize, cap: usize },
    #[error("new order is not a permutation of the layout labels")]
    NotAPermutation,
    #[error("keep list is empty")]
    EmptyKeep,
    #[error("negative interaction time {0}")]
    NegativeTime(f64),
    #[error("subsystem `{label}` must be {expected}")]
    WrongKind { label: String, expected: &'static str },
    #[error("cavity `{label}` would populate photon number {photons}, beyond its Fock cutoff")]
    FockOverflow { label: String, photons: usize },
    #[error("printed dispersive phases are defined only for a Fock cutoff of 2 (cavity `{label}` has {dim})")]
    CutoffTooLarge { label: String, dim: usize },
    #[error("subsystem `{label}` is entangled with the rest (purity {purity})")]
    Entangled { label: String, purity: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(&'static str),
    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    OutOfRange { what: &'static str, value: usize, min: usize, max: usize },
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(&'static str),
    #[error("unknown reference state `{0}`")]
    UnknownReference(String),
    #[error("reference `{name}` needs {needs}")]
    ReferenceArgument { name: &'static str, needs: &'static str },
    #[error("invalid script: {0}")]
    Script(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        Error::AtLine { line, source: alloc::boxed::Box::new(self) }
    }
}
