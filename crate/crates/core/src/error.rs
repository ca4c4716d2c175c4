//! Crate-wide error type. Every failure names the object and position that
//! caused it, so callers can surface exact witnesses.

use thiserror::Error;

use crate::bicomplex::Bidegree;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("quotient request where the claimed subspace is not contained in the total space")]
    QuotientNotContained,

    #[error("claimed basis of {what} is not linearly independent")]
    DependentBasis { what: String },

    #[error("invalid complex {name}: {problems}")]
    InvalidComplex { name: String, problems: String },

    #[error("map is not a chain map: block at {at} fails the commutation check")]
    NotAChainMap { at: Bidegree },

    #[error("chain map blocks do not match complex dimensions at {at}: {context}")]
    BlockShape { at: Bidegree, context: String },

    #[error(
        "vector of length {got} does not live in the declared space of dimension {want} at {at}"
    )]
    ElementShape {
        at: Bidegree,
        got: usize,
        want: usize,
    },

    #[error("vector at {at} does not represent a cohomology class (not in the cocycle space)")]
    NotInCocycleSpace { at: Bidegree },

    #[error("cover diagram {name} is invalid: {problems}")]
    InvalidDiagram { name: String, problems: String },

    #[error("restrictions through {mid_a} and {mid_b} from {face} to {simplex} disagree")]
    NonFunctorialRestrictions {
        face: String,
        mid_a: String,
        mid_b: String,
        simplex: String,
    },

    #[error("operation requires a two-set cover, got {sets} sets")]
    NotTwoSet { sets: usize },

    #[error("diagram {name} has no piece labelled {label}")]
    NoSuchPiece { name: String, label: String },

    #[error("sequence is not exact at {position}: {context}")]
    NotExact { position: String, context: String },

    #[error("zigzag lift failed at {at} while {stage}")]
    ZigzagFailure { at: Bidegree, stage: String },

    #[error("complex {name} is supported outside the square [0,{n}]x[0,{n}] (at {at})")]
    SupportOutsideSquare { name: String, n: i32, at: Bidegree },

    #[error("Stokes compatibility fails: integrating the differential of basis element {index} of {at} is nonzero")]
    StokesViolation { at: Bidegree, index: usize },

    #[error("pairing for {complex} is not chain-compatible at {at}")]
    PairingNotChain { complex: String, at: Bidegree },

    #[error("pairing squares do not commute for the face {face} inside {simplex} at {at}")]
    NonCommutingPairingSquare {
        face: String,
        simplex: String,
        at: Bidegree,
    },

    #[error("diagram {name} carries no extension maps, required for its dual diagram")]
    MissingExtensions { name: String },

    #[error("model {name} is invalid: {problems}")]
    InvalidModel { name: String, problems: String },

    #[error("model {name} carries no partition of unity")]
    MissingPartition { name: String },

    #[error("gluing input is not closed under the total differential")]
    GlueInputNotClosed,

    #[error("glued output is not closed: the model data is inconsistent")]
    GlueOutputNotClosed,

    #[error("cover morphism {name} is invalid: {problems}")]
    InvalidMorphism { name: String, problems: String },

    #[error("pushforward of {name} at {at}: adjoint blocks do not match the dual complex shapes")]
    AdjointShapeMismatch { name: String, at: Bidegree },

    #[error("degree of {name} is not defined: {context}")]
    DegreeUndefined { name: String, context: String },

    #[error("precondition failed for {check}: {which}")]
    PreconditionFailed { check: String, which: String },

    #[error("infeasible blow-up parameters: {context}")]
    InfeasibleParams { context: String },

    #[error("no {kind} named {name} in bundle")]
    MissingBundleItem { kind: String, name: String },

    #[error("parse error at {file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn parse(file: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn shape(context: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            context: context.into(),
        }
    }
}
