use thiserror::Error;

/// Errors raised by graph construction, solvers and checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} is not reachable from root {root}")]
    DisconnectedGraph { vertex: usize, root: usize },
    #[error("edge ({x}, {y}) has invalid weight {weight}")]
    NegativeWeight { x: usize, y: usize, weight: f64 },
    #[error("vertex {vertex} has nonpositive measure {value}")]
    NonpositiveMeasure { vertex: usize, value: f64 },
    #[error("self loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("vertex id {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("conflicting weights for edge ({x}, {y}): {first} vs {second}")]
    ConflictingWeight {
        x: usize,
        y: usize,
        first: f64,
        second: f64,
    },
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex {vertex} lies in the truncation halo")]
    HaloVertex { vertex: usize },
    #[error("field length {got} does not match vertex count {expected}")]
    FieldLength { expected: usize, got: usize },
    #[error("neither field is finitely supported away from the halo")]
    UnsupportedInput,

    #[error("invalid edge length on ({x}, {y}): {value}")]
    InvalidSigma { x: usize, y: usize, value: f64 },
    #[error("ball of radius {radius} reaches the truncation halo")]
    RadiusExceedsTruncation { radius: f64 },
    #[error("negative radius {radius}")]
    NegativeRadius { radius: f64 },

    #[error("graph would have {count} vertices, above the limit {limit}")]
    SizeOverflow { count: u128, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),

    #[error("interior vertex {vertex} has a truncated neighborhood")]
    HaloContamination { vertex: usize },
    #[error("potential is negative ({value}) at interior vertex {vertex}")]
    NegativePotential { vertex: usize, value: f64 },
    #[error("interior set covers every vertex; no exterior data remains")]
    InteriorCoversGraph,
    #[error("linear system is singular (zero pivot at row {row})")]
    SingularSystem { row: usize },
    #[error("iterative solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("field is not a supersolution at vertex {vertex}: {reason}")]
    NotASupersolution { vertex: usize, reason: String },

    #[error("truncation too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("monotonicity violated at step {step}, vertex {vertex} (excess {excess:e})")]
    MonotonicityViolation { step: usize, vertex: usize, excess: f64 },
    #[error("input field is identically zero")]
    TrivialInput,
    #[error("level M = {m} outside (0, {sup_pos})")]
    BadM { m: f64, sup_pos: f64 },
    #[error("branching {b} too small for a barrier (need b >= 2)")]
    BranchingTooSmall { b: usize },
    #[error("alpha = {alpha} is not supercritical (need alpha > 1)")]
    AlphaNotSupercritical { alpha: f64 },
    #[error("barrier inequality fails at distance {distance}: (1/V)Δh = {value}")]
    BarrierCheckFailed { distance: f64, value: f64 },
    #[error("no checked vertices beyond radius {radius}")]
    RegionEmpty { radius: f64 },

    #[error("Λ = {0} outside (0, 1)")]
    InvalidLambda(f64),
    #[error("λ = {0} must exceed 1")]
    BadLambda(f64),
    #[error("field is not a solution at vertex {vertex} (residual {residual:e})")]
    NotASolution { vertex: usize, residual: f64 },
    #[error("condition {condition} violated at vertex {vertex}")]
    ConditionViolated { condition: String, vertex: usize },

    #[error("tridiagonal system is singular at row {row}")]
    SingularTridiagonal { row: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
