use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("invalid transcendental argument `{arg}`: {reason}")]
    InvalidArgument { arg: String, reason: String },
    #[error("cannot differentiate with respect to `{0}`")]
    NotDifferentiable(String),
    #[error("cyclic substitution through `{0}`")]
    CyclicBinding(String),
    #[error("unbound atom `{0}` during numeric evaluation")]
    UnboundAtom(String),
    #[error("pole encountered while evaluating `{0}`")]
    Pole(String),
    #[error("every sample point hit a pole")]
    AllSamplesFailed,
    #[error("monomial classes do not partition the expression: {0}")]
    NonPartition(String),
    #[error("expression contains real-split variables: {0}")]
    RealSplitVariable(String),
    #[error("residual imaginary power after splitting: {0}")]
    ResidualImaginary(String),
    #[error("hierarchy index {n} exceeds the configured maximum {max}")]
    MemberTooLarge { n: usize, max: usize },
    #[error("catalogue has no member {0}")]
    NoSuchMember(usize),
    #[error("system is not in solved form: {0}")]
    NotSolved(String),
    #[error("derivative order bound {0} exceeded while reducing on solutions")]
    OrderBound(usize),
    #[error("vector fields live on different jet spaces")]
    JetMismatch,
    #[error("vector field is not concrete: {0}")]
    NotConcrete(String),
    #[error("basis is linearly dependent")]
    DependentBasis,
    #[error("no invertible pivot available: {0}")]
    NonInvertiblePivot(String),
    #[error("structure table is not closed")]
    NotClosed,
    #[error("generator is not a translation: {0}")]
    NotTranslation(String),
    #[error("reduction failed: {0}")]
    Reduction(String),
    #[error("degenerate pivot: {0}")]
    DegeneratePivot(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}
