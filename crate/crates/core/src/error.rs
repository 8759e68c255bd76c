use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at {line}:{column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("cannot differentiate with respect to `{name}`: not an independent variable")]
    NotIndependent { name: String },
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
    #[error("substitution cycle: {0} appears in its own replacement")]
    SubstitutionCycle(String),
    #[error("unbound atom `{0}` during evaluation")]
    UnboundAtom(String),
    #[error("no closed form supplied for function `{0}`")]
    UnboundFunction(String),
    #[error("evaluation hit a pole")]
    Pole,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate homotopy: theta = 1 reduces H(u, q) to (1 - q)*E0, which carries no information about E1")]
    DegenerateTheta,
}
