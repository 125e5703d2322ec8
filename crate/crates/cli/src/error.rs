//! Structured errors and exit codes.

use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    /// Offending field or file, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            kind: ErrorKind::Io,
            field: Some(path.display().to_string()),
            message: e.to_string(),
        }
    }

    /// Prefixes the field path with the file it came from.
    pub fn in_file(mut self, path: &Path) -> Self {
        let f = path.display().to_string();
        self.field = Some(match self.field {
            Some(inner) if inner != f => format!("{f}: {inner}"),
            _ => f,
        });
        self
    }

    /// 2 for bad input (including unreadable files), 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation | ErrorKind::Io => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fracscreen_core::Error> for CliError {
    fn from(e: fracscreen_core::Error) -> Self {
        use fracscreen_core::Error as E;
        match e {
            E::Invalid { what, reason } => Self {
                kind: ErrorKind::Validation,
                field: Some(what),
                message: reason,
            },
            E::Numerical(m) => Self {
                kind: ErrorKind::Numerical,
                field: None,
                message: m,
            },
            E::Io(e) => Self {
                kind: ErrorKind::Io,
                field: None,
                message: e.to_string(),
            },
            E::Json(e) => Self {
                kind: ErrorKind::Validation,
                field: None,
                message: format!("malformed json: {e}"),
            },
        }
    }
}
