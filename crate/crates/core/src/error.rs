use thiserror::Error;

use crate::relmodel::{Atom, Predicate};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("predicate {predicate} used with arity {found}, but its arity is {expected}")]
    ArityConflict {
        predicate: Predicate,
        expected: usize,
        found: usize,
    },

    #[error("fact {0} is listed as both endogenous and exogenous")]
    PartitionViolation(Atom),

    #[error("unsafe rule: head variable {variable} does not occur in the body of `{rule}`")]
    UnsafeRule { variable: String, rule: String },

    #[error("rule `{0}` has an empty body")]
    EmptyBody(String),

    #[error("program has no rule defining the answer predicate")]
    NoAnswerRule,

    #[error("extensional predicate {0} appears in the head of a rule")]
    EdbInRuleHead(Predicate),

    #[error("answer has {found} constants but the answer predicate has arity {expected}")]
    AnswerArity { expected: usize, found: usize },

    #[error("{0} is not an answer to the query on this instance")]
    NotAnAnswer(String),

    #[error("tuple {0} is not endogenous")]
    NotEndogenous(Atom),

    #[error("tuple {0} is not an actual cause")]
    NotACause(Atom),

    #[error("atom {0} is not a hypothesis of the abduction problem")]
    NotAHypothesis(Atom),

    #[error("hypothesis {0} is not relevant")]
    NotRelevant(Atom),

    #[error("the observation is not entailed by the program, the extensional database and all hypotheses")]
    ObservationNotEntailed,

    #[error("the observation is empty")]
    EmptyObservation,

    #[error("observation has {found} atoms, above the configured bound {bound}")]
    ObservationTooLong { bound: usize, found: usize },

    #[error("the abduction problem has no diagnosis")]
    NoDiagnosis,

    #[error("program must be boolean (propositional answer predicate)")]
    NotBoolean,

    #[error("program must consist of a single conjunctive rule")]
    NotSingleRule,

    #[error("query is not linear")]
    NotLinear,

    #[error("query contains a self-join")]
    SelfJoin,

    #[error("exact tree decomposition supports at most {cap} vertices, got {found}")]
    ExactTooLarge { cap: usize, found: usize },

    #[error("oracle budget of {budget} tuples exceeded ({found} tuples)")]
    BudgetExceeded { budget: usize, found: usize },

    #[error("invalid threshold {0}: expected 0 or 1/k")]
    InvalidThreshold(String),

    #[error("invalid flow network: {0}")]
    InvalidNetwork(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
