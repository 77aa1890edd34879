use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scene line {line}, column {column}: {message}")]
    Scene { line: usize, column: usize, message: String },
    #[error("`{command}` needs a [{section}] section in the scene")]
    MissingSection { command: &'static str, section: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Geom(#[from] projconf::GeomError),
}
