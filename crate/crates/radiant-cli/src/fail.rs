//! Exit-code policy: 0 success, 1 domain rejection, 2 usage or IO trouble.

use std::process::ExitCode;

pub enum Failure {
    /// The explanation is already on stderr (rendered diagnostics).
    Silent(u8),
    /// Invalid program, configuration, data, or metrics. Exit 1.
    Domain(String),
    /// Bad invocation or an unreadable/unwritable file. Exit 2.
    Usage(String),
}

impl Failure {
    pub fn domain(message: impl Into<String>) -> Failure {
        Failure::Domain(message.into())
    }

    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::Usage(message.into())
    }

    /// Prints the message, if any, and yields the process exit code.
    pub fn report(self) -> ExitCode {
        match self {
            Failure::Silent(code) => ExitCode::from(code),
            Failure::Domain(message) => {
                eprintln!("error: {message}");
                ExitCode::from(1)
            }
            Failure::Usage(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        }
    }
}
