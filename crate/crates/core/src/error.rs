use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("code length must be positive")]
    ZeroLength,
    #[error("alphabet size {0} is below 2")]
    AlphabetTooSmall(u32),
    #[error("word {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("symbol {symbol} at word {index} is outside the alphabet 0..{alphabet}")]
    SymbolOutOfRange { index: usize, symbol: u32, alphabet: u32 },
    #[error("infinity id {inf} is outside the alphabet 0..{alphabet}")]
    InfinityOutOfRange { inf: u32, alphabet: u32 },
    #[error("duplicate word {0:?}")]
    DuplicateWord(Vec<u32>),
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error("descendant set has {size} words, above the cap of {cap}")]
    DescendantCapExceeded { size: u128, cap: u128 },
    #[error("position {position} is out of range for length {length}")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("symbol map is not a permutation of 0..{0}")]
    NotAPermutation(u32),
    #[error("code has no designated infinity symbol")]
    MissingInfinity,

    #[error("{0} is below 2")]
    BelowTwo(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum of {max}", max = crate::field::MAX_FIELD_ORDER)]
    FieldTooLarge(u64),
    #[error("element {element} is not in a field of order {order}")]
    ElementOutOfRange { element: u32, order: u32 },
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("polynomial has degree {degree}, above the bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },

    #[error("coalition size c must be at least 2, got {0}")]
    CoalitionTooSmall(usize),
    #[error("P(t) needs t >= 1")]
    InvalidStrength,
    #[error("verification budget of {budget} checks exhausted after {examined}")]
    BudgetExceeded { budget: u64, examined: u64 },

    #[error("array has {found} symbols in row {row}, expected {expected}")]
    RaggedArray { row: usize, expected: usize, found: usize },
    #[error("strength {t} is not in 1..={k}")]
    StrengthOutOfRange { t: usize, k: usize },
    #[error("column {col} is out of range for {runs} runs")]
    ColumnOutOfRange { col: usize, runs: usize },
    #[error("length {length} must exceed c(t-1) = {bound}")]
    LengthTooShort { length: usize, bound: usize },
    #[error("orthogonal array index is not 1 (N={runs}, s^t={cells})")]
    IndexNotOne { runs: usize, cells: u128 },
    #[error("unsupported orthogonal array parameters: {0}")]
    UnsupportedArray(String),

    #[error("{0} evaluation points given, expected {1}")]
    PointCount(usize, usize),
    #[error("evaluation points are not pairwise distinct")]
    PointsNotDistinct,
    #[error("field order {m} is below l-1 = {needed}")]
    FieldTooSmall { m: u64, needed: usize },
    #[error("2t-1 = {} exceeds the length {length}", 2 * .t - 1)]
    StrengthTooLarge { t: usize, length: usize },
    #[error("c = {c} is below t = {t}")]
    CoalitionBelowStrength { c: usize, t: usize },
    #[error("length {length} = c(t-1) + {residue} with residue outside {t}..={c}")]
    ResidueOutOfRange {
        length: usize,
        c: usize,
        t: usize,
        residue: i64,
    },
    #[error("parent code violates P({t}): {detail}")]
    ParentNotPt { t: usize, detail: String },
    #[error("parent code is not {c}-frameproof: {detail}")]
    ParentNotFrameproof { c: usize, detail: String },
    #[error("code already contains the all-infinity word")]
    AlreadyAugmented,

    #[error("plan has no steps")]
    EmptyPlan,
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("plan produced {found}, expected {expected}")]
    PlanMismatch { expected: String, found: String },
    #[error("no construction for q={q}: {reason}")]
    Unplannable { q: u64, reason: String },
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
    #[error("rational with zero or negative denominator for c={c}, l={l}")]
    NonPositiveDenominator { c: usize, l: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
