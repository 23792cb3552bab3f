use thiserror::Error;

/// Which axiom of a Lorentzian pre-length space failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `ℓ(x,y) + ℓ(y,z) > ℓ(x,z)` for the stored triple.
    ReverseTriangle { x: usize, y: usize, z: usize },
    /// `ℓ(i,i)` is `-inf`.
    Diagonal { index: usize },
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomViolation::ReverseTriangle { x, y, z } => {
                write!(f, "reverse triangle inequality fails at ({x}, {y}, {z})")
            }
            AxiomViolation::Diagonal { index } => write!(f, "negative diagonal entry at {index}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("axiom violation: {0}")]
    Axiom(AxiomViolation),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("space does not satisfy the point distinction property")]
    PrePdpRequired,
    #[error("spaces have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("points not covered by any admissible diamond: {0:?}")]
    Uncoverable(Vec<usize>),
    #[error("net does not cover the subset; uncovered points {0:?}")]
    NetDoesNotCover(Vec<usize>),
    #[error("relation is not a correspondence: {0}")]
    NotACorrespondence(String),
    #[error("middle point sets of the composed correspondences differ")]
    MiddleMismatch,
    #[error("exact mode size cap exceeded ({0} points, cap {1})")]
    ExactCapExceeded(usize, usize),
    #[error("net cardinality mismatch at scale {l}, member {n}")]
    CardinalityMismatch { l: usize, n: usize },
    #[error("epsilon {epsilon} too large: first grid time {first} leaves the generator range starting at {lower}")]
    EpsilonTooLarge { epsilon: f64, first: f64, lower: f64 },
    #[error("fiber point {0} is not within the required radius of the fiber net")]
    NotAFiberNet(usize),
    #[error("sample plan resolves to no points")]
    EmptyPlan,
    #[error("unsupported metric family: {0}")]
    UnsupportedMetricFamily(String),
    #[error("point outside the model chart domain: {0}")]
    ChartDomain(String),
    #[error("comparison configuration unrealizable: {0}")]
    Unrealizable(String),
    #[error("comparison solver did not reach the residual tolerance ({0:e})")]
    SolverDiverged(f64),
    #[error("four-point configuration invalid: {0}")]
    InvalidConfiguration(String),
    #[error("atom {0} has no image under the map")]
    UnmappedAtom(usize),
    #[error("atom {0} lies outside the common support")]
    SupportMismatch(usize),
    #[error("measure weights at cover level {0} violate the mass bound")]
    UnboundedWeights(usize),
    #[error("entry ({0}, {1}) is not Cauchy within tolerance at depth {2}")]
    NonCauchy(usize, usize, usize),
    #[error("schedule violation: {0}")]
    ScheduleViolation(String),
    #[error("blow-up spec violated: {0}")]
    SpecViolated(String),
    #[error("no admissible basepoint pair for lambda {0}")]
    NoAdmissibleBasepoints(f64),
    #[error("causal relation contains a cycle through element {0}")]
    CycleDetected(usize),
    #[error("sprinkling region is empty")]
    EmptyRegion,
    #[error("json: {0}")]
    Json(String),
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Self {
        Error::Axiom(v)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
