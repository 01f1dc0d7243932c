//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An algebra must have at least one element.
    InvalidSize,
    /// A construction would exceed the configured size cap.
    CapacityExceeded { requested: u128, cap: u128 },
    /// A partition is not compatible with one of the operation tables.
    /// The two argument tuples are pointwise related but their images are not.
    NotACongruence {
        op: String,
        lhs_args: Vec<usize>,
        rhs_args: Vec<usize>,
    },
    /// A term uses an operation symbol absent from the algebra's signature.
    UnboundSymbol(String),
    /// A symbol was applied to the wrong number of arguments.
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    /// Two relations over different universes were combined.
    SizeMismatch { left: usize, right: usize },
    /// Join is only defined on equivalence relations.
    JoinRequiresEquivalences,
    /// A join or commutator operand evaluated to something that is not a
    /// congruence of the algebra at hand.
    OperandNotCongruence { subterm: String },
    /// A relation variable has no binding in the supplied assignment.
    UnboundVariable(String),
    /// An edge label has no binding in the supplied relation map.
    UnboundLabel(String),
    /// Graph construction is defined for `{∧,∘}`-terms only.
    RequiresJoinFree { found: String },
    /// The right-hand side contains a join, so a fold depth `k` is required.
    MissingJoinDepth,
    /// Commutator-flavoured conditions are verified, never searched.
    SearchOnCommutatorFlavor,
    /// Syntax error in a term or partition literal, with byte offset.
    Parse { pos: usize, msg: String },
    /// Syntax or validation error in an algebra file, with line number.
    File { line: usize, msg: String },
    /// An exhaustive check or search was larger than its budget.
    BudgetExceeded { required: u128, budget: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSize => write!(f, "algebra size must be at least 1"),
            Error::CapacityExceeded { requested, cap } => {
                write!(f, "capacity exceeded: {} elements requested, cap is {}", requested, cap)
            }
            Error::NotACongruence { op, lhs_args, rhs_args } => write!(
                f,
                "not a congruence: operation {} splits classes on tuples {:?} and {:?}",
                op, lhs_args, rhs_args
            ),
            Error::UnboundSymbol(s) => write!(f, "unbound operation symbol: {}", s),
            Error::ArityMismatch { symbol, expected, found } => {
                write!(f, "{} expects {} arguments, got {}", symbol, expected, found)
            }
            Error::SizeMismatch { left, right } => {
                write!(f, "relation size mismatch: {} vs {}", left, right)
            }
            Error::JoinRequiresEquivalences => {
                write!(f, "join requires both operands to be equivalence relations")
            }
            Error::OperandNotCongruence { subterm } => {
                write!(f, "operand of {} is not a congruence of the algebra", subterm)
            }
            Error::UnboundVariable(v) => write!(f, "unbound relation variable: {}", v),
            Error::UnboundLabel(v) => write!(f, "unbound edge label: {}", v),
            Error::RequiresJoinFree { found } => {
                write!(f, "graph construction requires a {{meet, composition}}-term; found {}", found)
            }
            Error::MissingJoinDepth => {
                write!(f, "right-hand side contains a join; supply a fold depth k")
            }
            Error::SearchOnCommutatorFlavor => {
                write!(f, "commutator-flavoured equations are verified against candidates, not searched")
            }
            Error::Parse { pos, msg } => write!(f, "parse error at offset {}: {}", pos, msg),
            Error::File { line, msg } => write!(f, "line {}: {}", line, msg),
            Error::BudgetExceeded { required, budget } => {
                write!(f, "budget exceeded: {} needed, budget is {}", required, budget)
            }
        }
    }
}

impl std::error::Error for Error {}
