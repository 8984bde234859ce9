use std::fmt;

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;
pub const EXIT_IDENTITY: i32 = 3;
pub const EXIT_ADMISSIBLE_GROWING: i32 = 4;

/// Failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    /// Configuration problem at a dotted field path.
    pub fn config(path: &str, msg: String) -> Self {
        Self::new(EXIT_CONFIG, format!("config error at `{path}`: {msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<mkg_core::MkgError> for CliError {
    fn from(e: mkg_core::MkgError) -> Self {
        Self::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_CONFIG, format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(EXIT_CONFIG, format!("json: {e}"))
    }
}
