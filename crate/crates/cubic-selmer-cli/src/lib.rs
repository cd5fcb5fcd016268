//! Library side of the `cubic-selmer` command: report types, table reproduction and the
//! mapping from library errors to exit codes.
//!
//! Reports serialize every integer as a decimal string, so JSON consumers never lose
//! precision on large `a` or `b`.

pub mod report;
pub mod table;

use cubic_selmer::Error;

/// Process exit status for a failed command.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Unsupported(_) => 2,
        Error::LimitExceeded { .. } => 3,
        Error::Consistency(_) => 4,
    }
}
