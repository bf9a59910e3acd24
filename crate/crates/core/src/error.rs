use thiserror::Error;

use crate::schema::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown group type `{0}`")]
    UnknownGroup(String),

    #[error("group `{group}` is {kind} and cannot be crossed")]
    UncrossableGroup { group: String, kind: String },

    #[error("crossing needs at least two group types, got {0}")]
    TooFewGroups(usize),

    #[error("group `{0}` has no observed values to cross")]
    NoObservedValues(String),

    #[error("kernel `{form}` is not compatible with {kind} group `{group}`")]
    IncompatibleKernel { group: String, kind: String, form: String },

    #[error("cannot cumulate an empty list of scores")]
    EmptyScores,

    #[error("nash cumulation got negative score {0}; enable `nash_rescale` to map [-1,1] onto [0,1]")]
    NegativeNash(f64),

    #[error("egalitarian comparison needs equal-length vectors ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("set of instances is empty")]
    EmptySet,

    #[error("no presence target for attribute `{0}`")]
    MissingTarget(String),

    #[error("no measured attributes to score diversity over")]
    NoMeasuredAttributes,

    #[error("inclusion is undefined for instance `{0}`: no profile attribute could be scored")]
    UndefinedInclusion(String),

    #[error("inclusion for `{group}` is undefined on instance `{instance}`")]
    UndefinedAttribute { group: String, instance: String },

    #[error("no item carries group `{0}`")]
    Unpopulated(String),

    #[error("unknown instance id `{0}`")]
    UnknownInstance(String),

    #[error("k = {k} exceeds catalog size {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("k must be at least 1")]
    KZero,

    #[error("C({n},{k}) = {count} subsets exceeds the enumeration cap {cap}; use greedy selection")]
    CapExceeded { n: usize, k: usize, count: u128, cap: u64 },

    #[error("invalid input: {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),

    #[error("parse error: {0}")]
    Parse(String),
}
