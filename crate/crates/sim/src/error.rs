use std::path::PathBuf;

/// Everything the driver can fail with. [`SimError::exit_code`] maps the
/// variants onto the command-line contract.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// The scenario, or a data file it references, is unusable.
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A model call failed while a study was running.
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: eit_core::Error,
    },
    #[error("{}: {message}", path.display())]
    Output { path: PathBuf, message: String },
}

impl SimError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Validation(_) => 1,
            _ => 2,
        }
    }

    pub fn model(context: impl Into<String>) -> impl FnOnce(eit_core::Error) -> SimError {
        let context = context.into();
        move |source| SimError::Model { context, source }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
