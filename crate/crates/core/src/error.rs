use thiserror::Error;

/// Failure to read an instance or cover file; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `p setcover <n> <m> <k>` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("malformed line: {0}")]
    BadLine(String),
    #[error("element {elem} out of range 1..={n}")]
    ElementOutOfRange { elem: u64, n: usize },
    #[error("set of size {size} exceeds k = {k}")]
    SetTooLarge { size: usize, k: usize },
    #[error("empty set")]
    EmptySet,
    #[error("duplicate element {0} within a set")]
    DuplicateElement(u64),
    #[error("elements not strictly increasing")]
    NotIncreasing,
    #[error("set repeats an earlier set (line {0})")]
    DuplicateSet(usize),
    #[error("header declares {declared} sets but {found} were read")]
    SetCountMismatch { declared: usize, found: usize },
    #[error("element {0} is not covered by any set")]
    Uncovered(u64),
    #[error("base set number {0} does not exist")]
    UnknownBaseSet(usize),
}

/// A cover or packing that violates its invariants against an instance.
/// Element ids in messages are 1-based, matching the file format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("sets #{first} and #{second} overlap on element {elem}")]
    Overlap {
        first: usize,
        second: usize,
        elem: u32,
    },
    #[error("element {0} is not covered")]
    Gap(u32),
    #[error("set #{member} is not a subset of base set {base}: element {elem}")]
    NotSubset {
        member: usize,
        base: usize,
        elem: u32,
    },
    #[error("set #{0} refers to a missing base set")]
    UnknownBase(usize),
    #[error("set #{0} is empty or has unsorted/duplicate elements")]
    Malformed(usize),
    #[error("set #{member} has {size} elements, packing class is {class}")]
    WrongSize {
        member: usize,
        size: usize,
        class: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("element {elem} out of range for universe of size {n}")]
    OutOfRange { elem: u32, n: usize },
    #[error("base set {index} is empty, unsorted, or has duplicates")]
    Malformed { index: usize },
    #[error("base set {index} has {size} elements, k = {k}")]
    TooLarge { index: usize, size: usize, k: usize },
    #[error("base set {index} repeats base set {earlier}")]
    Duplicate { index: usize, earlier: usize },
    #[error("element {0} is covered by no base set")]
    Uncovered(u32),
    #[error("instance has k = {k}, operation requires k <= {max}")]
    KTooLarge { k: usize, max: usize },
}
