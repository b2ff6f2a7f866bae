//! `persuade`: command-line front end for persuasion-core.

pub mod app;
pub mod io;
pub mod model_spec;

pub use app::{run, Cli, CliError, Outcome};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SIZE: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "PERSUADE_THREADS";
