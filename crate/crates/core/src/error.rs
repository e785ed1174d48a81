use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("name is empty after normalization: {0:?}")]
    InvalidName(String),
    #[error("duplicate species: {0}")]
    DuplicateSpecies(String),
    #[error("edit target not found: {0}")]
    EditTargetNotFound(String),
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
    #[error("component has no species")]
    EmptyTaxon,
    #[error("query is {len} characters, provider limit is {limit}")]
    QueryTooLong { len: usize, limit: usize },
    #[error("invalid query constraints: {0}")]
    InvalidConstraints(String),
    #[error("corpus is empty after preprocessing")]
    EmptyCorpus,
    #[error("score vector has {got} entries, schema has {expected}")]
    SchemaMismatch { expected: usize, got: usize },
    #[error("invalid topic schema: {0}")]
    InvalidSchema(String),
    #[error("series has {0} points, at least 4 are required")]
    SeriesTooShort(usize),
    #[error("malformed data file at line {line}: {reason}")]
    Data { line: usize, reason: String },
}
