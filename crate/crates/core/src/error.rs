use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("duplicate generator '{0}'")]
    DuplicateGenerator(char),

    #[error("malformed parabolic descriptor: {0}")]
    MalformedDescriptor(String),

    #[error("unknown letter '{0}'")]
    UnknownLetter(char),

    #[error("letter '{letter}' is not a generator of parabolic subgroup {index}")]
    ForeignLetter { letter: char, index: usize },

    #[error("invalid relator '{0}': relators must be nonempty and freely reduced")]
    InvalidRelator(String),

    #[error("relator '{0}' does not reduce to the identity")]
    NontrivialRelator(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,

    #[error("element budget of {limit} exceeded while enumerating {what}")]
    Budget { what: String, limit: usize },

    #[error("precomputed tables are missing (and the metric fallback is disabled where it applies)")]
    MissingTables,

    #[error("cyclic shortening did not stabilise within {0} iterations; the constants profile is inconsistent")]
    NonTermination(usize),

    #[error("the elements are not conjugate")]
    NotConjugate,

    #[error("parabolic subgroup {0} has no conjugacy solver")]
    NoConjugacySolver(usize),

    #[error("cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::DuplicateGenerator(_) => "duplicate-generator",
            Error::MalformedDescriptor(_) => "malformed-descriptor",
            Error::UnknownLetter(_) => "unknown-letter",
            Error::ForeignLetter { .. } => "foreign-letter",
            Error::InvalidRelator(_) => "invalid-relator",
            Error::NontrivialRelator(_) => "nontrivial-relator",
            Error::InvalidConstants(_) => "constants",
            Error::NotCyclicallyReduced => "not-cyclically-reduced",
            Error::Budget { .. } => "budget",
            Error::MissingTables => "missing-tables",
            Error::NonTermination(_) => "non-termination",
            Error::NotConjugate => "not-conjugate",
            Error::NoConjugacySolver(_) => "no-conjugacy-solver",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
        }
    }
}
