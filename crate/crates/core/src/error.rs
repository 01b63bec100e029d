use thiserror::Error;

/// Malformed structure input. These are input errors, distinct from a
/// well-formed structure that happens to contain a monochromatic triangle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("pair {{{0}, {1}}} colored twice")]
    DuplicatePair(String, String),
    #[error("pair {{{0}, {1}}} has no color")]
    MissingPair(String, String),
    #[error("point `{0}` paired with itself")]
    SelfPair(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("bad color term `{0}`")]
    BadColor(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}")]
    Structure {
        line: usize,
        #[source]
        source: StructureError,
    },
    #[error("missing section `{0}`")]
    MissingSection(String),
}

impl ParseError {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("map has {got} entries but the source has {expected} points")]
    WrongLength { expected: usize, got: usize },
    #[error("map sends source point {0} outside the target")]
    OutOfRange(usize),
    #[error("not injective")]
    NotInjective,
    #[error("order not preserved between source points {0} and {1}")]
    OrderViolated(usize, usize),
    #[error("color not preserved on source pair {0}, {1}")]
    ColorViolated(usize, usize),
    #[error("structures live at different levels ({0} vs {1})")]
    LevelMismatch(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("left embedding: {0}")]
    Left(MorphismError),
    #[error("right embedding: {0}")]
    Right(MorphismError),
    #[error("input `{0}` is not a valid structure")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("point {0} lies in the support")]
    PointInSupport(usize),
    #[error("support position {0} out of range")]
    SupportOutOfRange(usize),
    #[error("support is not strictly increasing")]
    UnsortedSupport,
    #[error("cut {cut} exceeds support size {size}")]
    CutOutOfRange { cut: usize, size: usize },
    #[error("{colors} colors for a support of size {size}")]
    ColorCount { colors: usize, size: usize },
    #[error("color {0} above the type level")]
    ColorAboveLevel(String),
    #[error("monochromatic triangle with support points {0} and {1}")]
    Monochromatic(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KatetovError {
    #[error("expected {expected} budgets, got {got}")]
    BudgetCount { expected: usize, got: usize },
    #[error("budgets differ ({0} vs {1})")]
    BudgetMismatch(u64, u64),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("input structure is not valid")]
    InvalidInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point `{0}` already in the domain")]
    InDomain(String),
    #[error("point `{0}` already in the range")]
    InRange(String),
    #[error("not a partial isomorphism")]
    NotPartialIso,
    #[error("seed structure must be valid at level 0")]
    BadSeed,
    #[error(transparent)]
    Type(#[from] TypeError),
}
