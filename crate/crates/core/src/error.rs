// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("input outside operator domain: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error at node {index:?}: {message}")]
    Parse {
        index: Option<usize>,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
