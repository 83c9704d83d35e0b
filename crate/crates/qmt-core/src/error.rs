//! Error type shared across the toolkit.
//!
//! Errors fall into two classes: bad input (rejected axioms, malformed files,
//! out-of-range events) and internal invariant violations (a classifier
//! producing a non-upper set, a functor law failing, an oracle diff). The CLI
//! maps the first class to exit code 1 and the second to exit code 2.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample space must have between 1 and {cap} histories, got {n}")]
    CapExceeded { n: usize, cap: usize },

    #[error("history labels must be nonempty and pairwise distinct")]
    BadLabels,

    #[error("decoherence matrix is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("exact and float scalars cannot be mixed in one theory")]
    MixedModes,

    #[error("matrix is not Hermitian: entry ({row},{col}) is not the conjugate of ({col},{row})")]
    NonHermitian { row: usize, col: usize },

    #[error("total measure D(S,S) = {total}, expected 1")]
    NotUnitTotal { total: String },

    #[error("measure of event {event} is {value} < 0")]
    NegativeMeasure { event: String, value: String },

    #[error("amplitude vector is not normalized: |sum|^2 = {norm}, expected 1")]
    NotNormalized { norm: String },

    #[error("event {event} does not live on this sample space")]
    ForeignEvent { event: String },

    #[error("operands are defined over different sample spaces")]
    SpaceMismatch,

    #[error("event set is not a Boolean sublattice: {reason}")]
    NotASublattice { reason: String },

    #[error("blocks do not form a partition: {reason}")]
    BadPartition { reason: String },

    #[error(
        "designation is not an upper set: {member} is included but its coarsening {missing} is not"
    )]
    NotAnUpperSet { member: String, missing: String },

    #[error(
        "computed tag {tag} is not an upper set: {member} is tagged but its coarsening {missing} is not; \
         this indicates a bug in the classifier, not in the input"
    )]
    InternalUpperSetViolation {
        tag: String,
        member: String,
        missing: String,
    },

    #[error("a coevent must map at least one event to 1")]
    EmptyCoevent,

    #[error("coevent is not multiplicative: support is not a filter (witness pair {a}, {b})")]
    NotMultiplicative { a: String, b: String },

    #[error("the dual of this coevent would be the empty event")]
    EmptyDual,

    #[error("event {event} lies outside the sublattice this valuation is defined on")]
    OutsideDomain { event: String },

    #[error("partitions are not comparable under refinement")]
    NotComparable,

    #[error("event {block} is not a block of the partition")]
    NotABlock { block: String },

    #[error("element {index} is not in the poset")]
    ForeignElement { index: usize },

    #[error("relation is not a partial order: {reason}")]
    NotAPartialOrder { reason: String },

    #[error("poset with {len} elements is too large for {operation} (limit {limit})")]
    PosetTooLarge {
        len: usize,
        limit: usize,
        operation: String,
    },

    #[error("not a subobject: stage {stage} element {element} escapes the subobject under the transition to stage {target}")]
    NotASubobject {
        stage: usize,
        element: String,
        target: usize,
    },

    #[error("functor law violated: {detail}")]
    FunctorLaw { detail: String },

    #[error("event {event} is not accessible from any member of the poset")]
    NotAccessibleAnywhere { event: String },

    #[error("the valuation's home partition is not a member of the poset")]
    HomeNotInPoset,

    #[error("no {tag} designation was supplied for this theory")]
    NoDesignation { tag: String },

    #[error("Heyting carrier is empty")]
    EmptyCarrier,

    #[error("unknown example name {name}")]
    UnknownExample { name: String },

    #[error("oracle disagrees with the fast path in {check}: {witness}")]
    OracleMismatch { check: String, witness: String },

    #[error("invalid number literal {text}: {reason}")]
    BadNumber { text: String, reason: String },

    #[error("theory file is not valid JSON: {0}")]
    Syntax(String),

    #[error("theory file is invalid: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable discriminator used in JSON error envelopes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::BadLabels => "bad-labels",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::MixedModes => "mixed-modes",
            Error::NonHermitian { .. } => "non-hermitian",
            Error::NotUnitTotal { .. } => "not-unit-total",
            Error::NegativeMeasure { .. } => "negative-measure",
            Error::NotNormalized { .. } => "not-normalized",
            Error::ForeignEvent { .. } => "foreign-event",
            Error::SpaceMismatch => "space-mismatch",
            Error::NotASublattice { .. } => "not-a-sublattice",
            Error::BadPartition { .. } => "bad-partition",
            Error::NotAnUpperSet { .. } => "not-an-upper-set",
            Error::InternalUpperSetViolation { .. } => "internal-upper-set-violation",
            Error::EmptyCoevent => "empty-coevent",
            Error::NotMultiplicative { .. } => "not-multiplicative",
            Error::EmptyDual => "empty-dual",
            Error::OutsideDomain { .. } => "outside-domain",
            Error::NotComparable => "not-comparable",
            Error::NotABlock { .. } => "not-a-block",
            Error::ForeignElement { .. } => "foreign-element",
            Error::NotAPartialOrder { .. } => "not-a-partial-order",
            Error::PosetTooLarge { .. } => "poset-too-large",
            Error::NotASubobject { .. } => "not-a-subobject",
            Error::FunctorLaw { .. } => "functor-law",
            Error::NotAccessibleAnywhere { .. } => "not-accessible-anywhere",
            Error::HomeNotInPoset => "home-not-in-poset",
            Error::NoDesignation { .. } => "no-designation",
            Error::EmptyCarrier => "empty-carrier",
            Error::UnknownExample { .. } => "unknown-example",
            Error::OracleMismatch { .. } => "oracle-mismatch",
            Error::BadNumber { .. } => "bad-number",
            Error::Syntax(_) => "syntax",
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 1 for bad input, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InternalUpperSetViolation { .. }
            | Error::NotAPartialOrder { .. }
            | Error::NotASubobject { .. }
            | Error::FunctorLaw { .. }
            | Error::EmptyCarrier
            | Error::OracleMismatch { .. } => 2,
            _ => 1,
        }
    }
}
