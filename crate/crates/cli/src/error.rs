use betadim::ErrorKind;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(betadim::Error),
    /// The command ran but one of its checks failed; the report was written.
    Validation(String),
    Io(String),
}

impl From<betadim::Error> for CliError {
    fn from(e: betadim::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 5,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::Validation => 3,
                ErrorKind::Precision => 4,
                ErrorKind::Internal => 5,
            },
        }
    }

    /// Snake-case variant name, stable across releases.
    pub fn code(&self) -> String {
        match self {
            CliError::Usage(_) => "usage".into(),
            CliError::Validation(_) => "validation_failed".into(),
            CliError::Io(_) => "io".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                let name: String = dbg.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
                snake(&name)
            }
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "code": self.code(), "exit_code": self.exit_code(), "message": self.message() } })
    }
}

fn snake(name: &str) -> String {
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}
