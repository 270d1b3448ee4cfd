use thiserror::Error;

/// An operation was asked to handle an instance outside its domain, e.g. the
/// two-stage rule on a three-stage instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported instance: {0}")]
pub struct UnsupportedInstance(pub String);
