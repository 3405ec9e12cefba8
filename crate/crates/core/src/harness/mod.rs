//! Command-line driver: configuration, dispatch, dataset export and exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | configuration or input error |
//! | 2 | `validate` found a failing check |
//! | 3 | numerical abort (non-PSD state, NaN) |

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

pub use cli::run;
pub use commands::{
    cmd_evolve, cmd_map_qcr, cmd_quench_length, cmd_sweep_temperature, cmd_validate, Outcome,
    Report,
};
pub use config::{Range, RunConfig, Values};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for an error that stopped a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidState { .. }
        | Error::NotPositive { .. }
        | Error::NonFinite(_)
        | Error::DegenerateBlock { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}
