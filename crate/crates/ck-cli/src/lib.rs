//! IO layer over ck-core: run configuration, file formats, and the
//! subcommand implementations behind the `ckosc` binary.

pub mod config;
pub mod formats;

pub mod commands;

/// Process exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const PARSE_ERROR: i32 = 2;
    pub const INDEFINITE: i32 = 3;
    pub const INTEGRATION_ERROR: i32 = 4;
    pub const CONFIG_ERROR: i32 = 5;
}
