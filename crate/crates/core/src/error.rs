use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("field count must be between 1 and 12, got {0}")]
    FieldCount(usize),
    #[error("field {field}: width must be between 1 and 64 bits, got {width}")]
    Width { field: usize, width: u32 },
    #[error("malformed field list '{0}', expected comma-separated widths such as 4,4,4")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("field {field}: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { field: usize, lo: u64, hi: u64 },
    #[error("field {field}: value {value} exceeds domain maximum {max}")]
    OutOfRange { field: usize, value: u64, max: u64 },
    #[error("expected {expected} intervals, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("missing 'default accept' or 'default deny' directive")]
    MissingDefault,
    #[error("duplicate default directive (first given on line {first_line})")]
    DuplicateDefault { first_line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("rule has {rule} intervals left but the tree has {tree} levels left")]
    ArityMismatch { rule: usize, tree: usize },
    #[error("interval {lo}..={hi} exceeds field {field} domain maximum {max}")]
    OutOfRange {
        field: usize,
        lo: u64,
        hi: u64,
        max: u64,
    },
    #[error("tree does not cover the full packet space")]
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("value {value} does not fit in field {field} ({width} bits)")]
    ValueOutOfRange {
        field: usize,
        value: u64,
        width: u32,
    },
    #[error("field index {0} is outside the configuration")]
    NoSuchField(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("expected a {expected} expression, got {found}")]
    WrongForm {
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing 'p cnf' or 'p dnf' header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("literal {literal} exceeds declared variable count {vars}")]
    VariableRange { literal: i64, vars: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("packet space has {required} packets but the enumeration budget is {allowed}")]
    BudgetExceeded { required: u128, allowed: u128 },
}
