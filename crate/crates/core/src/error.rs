use alloc::string::String;

/// Errors raised by the core solver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a game needs at least two players, got {0}")]
    TooFewPlayers(usize),
    #[error("player {0} must have at least two pure strategies")]
    TrivialPlayer(usize),
    #[error("payoff table has {got} entries, expected {expected}")]
    PayoffCount { expected: usize, got: usize },
    #[error("payoff of player {player} at outcome {outcome} is not finite")]
    NonFinitePayoff { player: usize, outcome: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("player {0} is out of range")]
    PlayerOutOfRange(usize),
    #[error("strategy {strategy} is out of range for player {player}")]
    StrategyOutOfRange { player: usize, strategy: usize },
    #[error("support of player {0} is empty")]
    EmptySupport(usize),
    #[error("system is not square: {equations} equations in {variables} unknowns")]
    NotSquare { equations: usize, variables: usize },
    #[error("variable index {index} exceeds the {nvars} declared variables")]
    UnknownVariable { index: usize, nvars: usize },
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("start and target systems do not share a shape")]
    ShapeMismatch,
    #[error("matrix is {rows}x{cols} but the format needs at least {need_rows}x{need_cols}")]
    MatrixTooSmall {
        rows: usize,
        cols: usize,
        need_rows: usize,
        need_cols: usize,
    },
    #[error("matrix is not totally nonsingular")]
    NotTotallyNonsingular,
    #[error("linear subsystem for player {0} is singular")]
    SingularStartBlock(usize),
    #[error("start roots {0} and {1} coincide; re-seed the matrix")]
    DuplicateStartRoot(usize, usize),
    #[error("assignment does not match the game format")]
    InvalidAssignment,
    #[error("start system must be unrestricted before restricting it")]
    AlreadyRestricted,
    #[error("point is not a root of the start system (residual {0:e})")]
    NotAStartRoot(f64),
    #[error("invalid homotopy configuration")]
    InvalidConfig,
    #[error("no start system prepared for this support")]
    MissingStartSystem,
}

pub type Result<T> = core::result::Result<T, Error>;
