//! Errors carrying the process exit code: 1 for user errors, 2 for
//! internal failures.

use std::fmt;

use htx_core::classifier::ClassifierError;
use htx_core::hashgraph::GraphError;
use htx_core::taxonomy::TaxonomyError;
use htx_pipeline::PipelineError;

pub const USER: u8 = 1;
pub const INTERNAL: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Failure {
    pub fn user(message: impl Into<String>) -> Self {
        Self {
            code: USER,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: INTERNAL,
            message: message.into(),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub trait Context<T> {
    /// Failure blamed on the caller's input, such as a missing or malformed file.
    fn user(self, what: &str) -> Outcome<T>;
    fn internal(self, what: &str) -> Outcome<T>;
}

impl<T, E: fmt::Display> Context<T> for Result<T, E> {
    fn user(self, what: &str) -> Outcome<T> {
        self.map_err(|e| Failure::user(format!("{what}: {e}")))
    }

    fn internal(self, what: &str) -> Outcome<T> {
        self.map_err(|e| Failure::internal(format!("{what}: {e}")))
    }
}

fn classifier_code(e: &ClassifierError) -> u8 {
    match e {
        ClassifierError::NoInstances
        | ClassifierError::NoTweets(_)
        | ClassifierError::FoldTooSmall { .. }
        | ClassifierError::UnknownHashtag(_)
        | ClassifierError::Parse { .. }
        | ClassifierError::InvalidModel(_)
        | ClassifierError::Json(_) => USER,
        ClassifierError::Io(io) if io.kind() == std::io::ErrorKind::NotFound => USER,
        _ => INTERNAL,
    }
}

fn graph_code(e: &GraphError) -> u8 {
    match e {
        GraphError::KTooLarge { .. } | GraphError::InvalidK | GraphError::InvalidBalance(_) => USER,
        _ => INTERNAL,
    }
}

fn taxonomy_code(e: &TaxonomyError) -> u8 {
    match e {
        TaxonomyError::Store(_) => INTERNAL,
        _ => USER,
    }
}

pub fn classifier(what: &str, e: ClassifierError) -> Failure {
    Failure {
        code: classifier_code(&e),
        message: format!("{what}: {e}"),
    }
}

pub fn graph(what: &str, e: GraphError) -> Failure {
    Failure {
        code: graph_code(&e),
        message: format!("{what}: {e}"),
    }
}

pub fn taxonomy(what: &str, e: TaxonomyError) -> Failure {
    Failure {
        code: taxonomy_code(&e),
        message: format!("{what}: {e}"),
    }
}

pub fn pipeline(e: PipelineError) -> Failure {
    let code = match &e {
        PipelineError::Config(_) => USER,
        PipelineError::Stage { source, .. } => {
            if let Some(c) = source.downcast_ref::<ClassifierError>() {
                classifier_code(c)
            } else if let Some(g) = source.downcast_ref::<GraphError>() {
                graph_code(g)
            } else if let Some(t) = source.downcast_ref::<TaxonomyError>() {
                taxonomy_code(t)
            } else {
                INTERNAL
            }
        }
        _ => INTERNAL,
    };
    let message = match &e {
        PipelineError::Stage { quarantined: Some(q), .. } => {
            format!("{e} (partial outputs moved to {})", q.display())
        }
        _ => e.to_string(),
    };
    Failure { code, message }
}
