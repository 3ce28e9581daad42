use bppr_core::Error as CoreError;

/// Error classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable files, bad flags, missing or malformed data.
    Input,
    /// A model file or prediction input that does not match the expected schema.
    Schema,
    /// Numerical failure: singular designs, degenerate responses, zero variance.
    Numeric,
}

impl ErrorKind {
    pub fn code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Schema => 3,
            ErrorKind::Numeric => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Input => "input",
            ErrorKind::Schema => "schema",
            ErrorKind::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Input, message: message.into() }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Schema, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Numeric, message: message.into() }
    }

    pub fn code(&self) -> i32 {
        self.kind.code()
    }

    /// Single machine-parseable line for stderr.
    pub fn line(&self) -> String {
        format!("error code={} kind={} message={:?}", self.code(), self.kind.name(), self.message)
    }

    /// Core errors raised while mapping new data onto a stored model's
    /// feature space are schema problems rather than bad input.
    pub fn from_core_against_model(e: CoreError) -> Self {
        match e {
            CoreError::MissingColumn(_)
            | CoreError::UnknownLevel { .. }
            | CoreError::DimensionMismatch(_)
            | CoreError::NonNumeric(_) => Self::schema(e.to_string()),
            other => other.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::SingularDesign
            | CoreError::DegenerateResponse
            | CoreError::ZeroVariance
            | CoreError::DegenerateProjection
            | CoreError::DegenerateKnots => ErrorKind::Numeric,
            CoreError::DimensionMismatch(_) => ErrorKind::Schema,
            _ => ErrorKind::Input,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let codes = [ErrorKind::Input, ErrorKind::Schema, ErrorKind::Numeric].map(ErrorKind::code);
        assert_eq!(codes, [2, 3, 4]);
    }

    #[test]
    fn line_quotes_message() {
        let e = CliError::input("column \"y\" not found");
        assert_eq!(e.line(), r#"error code=2 kind=input message="column \"y\" not found""#);
    }

    #[test]
    fn core_mapping() {
        assert_eq!(CliError::from(CoreError::SingularDesign).code(), 4);
        assert_eq!(CliError::from(CoreError::MissingColumn("y".into())).code(), 2);
        assert_eq!(CliError::from_core_against_model(CoreError::MissingColumn("x1".into())).code(), 3);
        assert_eq!(CliError::from_core_against_model(CoreError::ZeroVariance).code(), 4);
    }
}
