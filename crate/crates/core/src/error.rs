use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("bad coefficient group: {0}")]
    BadCoefficients(String),

    #[error("{dim}-cell {cell} references missing face {face}")]
    DanglingFace { dim: usize, cell: usize, face: usize },

    #[error("composite boundary is nonzero: {dim}-cell {cell} reaches ({}-cell) {face} with total coefficient {total}", dim - 2)]
    BoundaryNotSquareZero {
        dim: usize,
        cell: usize,
        face: usize,
        total: i64,
    },

    #[error("duplicate identifier {id:?} in dimension {dim}")]
    DuplicateId { dim: usize, id: String },

    #[error("{dim}-cell {cell} has a zero incidence coefficient")]
    ZeroCoefficient { dim: usize, cell: usize },

    #[error("malformed complex: {0}")]
    Malformed(String),

    #[error("cochain and complex do not match")]
    ComplexMismatch,

    #[error("no {dim}-cell with index {cell}")]
    UnknownCell { dim: usize, cell: usize },

    #[error("degree {degree} is out of range for a complex of dimension {top}")]
    DegreeOutOfRange { degree: usize, top: usize },

    #[error("search budget of {budget} nodes exceeded; best distance found {best} (not exact)")]
    SearchBudgetExceeded { budget: u64, best: usize },

    #[error("enumeration table too large: {size_desc} exceeds the limit of {limit} entries; shrink the complex or use sampled upper-bound mode")]
    TableTooLarge { size_desc: String, limit: u64 },

    #[error("relator of 2-cell {cell} maps to non-identity permutation {permutation:?}")]
    RelatorNotTrivial { cell: usize, permutation: Vec<usize> },

    #[error("tree edges do not form a spanning tree: {0}")]
    NotSpanningTree(String),

    #[error("base complex is disconnected")]
    Disconnected,

    #[error("bad monodromy data: {0}")]
    BadMonodromy(String),

    #[error("not a covering map: {0}")]
    NotACovering(String),

    #[error("projection is not injective on the region: cells {0:?} collide")]
    NotInjectiveOnRegion(Vec<(usize, usize)>),

    #[error("not a closed manifold: {dim}-simplex {simplex} lies in {count} top simplices")]
    NotClosedManifold { dim: usize, simplex: usize, count: usize },

    #[error("link of vertex {vertex} is disconnected")]
    DisconnectedLink { vertex: usize },

    #[error("complex is not simplicial: {0}")]
    NotSimplicial(String),

    #[error("coefficients {0} are not supported here without orientation data")]
    CoefficientNotSupported(String),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("cycle is not a boundary (it represents a nontrivial homology class)")]
    NotABoundary,

    #[error("certificate violated: {0}")]
    CertificateViolated(String),

    #[error("tower too shallow: maximum diameter {max_diameter} does not exceed {threshold}")]
    TowerTooShallow { max_diameter: usize, threshold: String },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Process exit code for this error: 1 validation, 2 budget, 3 certificate violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SearchBudgetExceeded { .. } | Error::TableTooLarge { .. } => 2,
            Error::CertificateViolated(_) => 3,
            _ => 1,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BadCoefficients(_) => "BadCoefficients",
            Error::DanglingFace { .. } => "DanglingFace",
            Error::BoundaryNotSquareZero { .. } => "BoundaryNotSquareZero",
            Error::DuplicateId { .. } => "DuplicateId",
            Error::ZeroCoefficient { .. } => "ZeroCoefficient",
            Error::Malformed(_) => "Malformed",
            Error::ComplexMismatch => "ComplexMismatch",
            Error::UnknownCell { .. } => "UnknownCell",
            Error::DegreeOutOfRange { .. } => "DegreeOutOfRange",
            Error::SearchBudgetExceeded { .. } => "SearchBudgetExceeded",
            Error::TableTooLarge { .. } => "TableTooLarge",
            Error::RelatorNotTrivial { .. } => "RelatorNotTrivial",
            Error::NotSpanningTree(_) => "NotSpanningTree",
            Error::Disconnected => "Disconnected",
            Error::BadMonodromy(_) => "BadMonodromy",
            Error::NotACovering(_) => "NotACovering",
            Error::NotInjectiveOnRegion(_) => "NotInjectiveOnRegion",
            Error::NotClosedManifold { .. } => "NotClosedManifold",
            Error::DisconnectedLink { .. } => "DisconnectedLink",
            Error::NotSimplicial(_) => "NotSimplicial",
            Error::CoefficientNotSupported(_) => "CoefficientNotSupported",
            Error::NotACycle => "NotACycle",
            Error::NotABoundary => "NotABoundary",
            Error::CertificateViolated(_) => "CertificateViolated",
            Error::TowerTooShallow { .. } => "TowerTooShallow",
            Error::BadParameters(_) => "BadParameters",
            Error::Format(_) => "Format",
        }
    }
}
