//! Spec files, the result store and the subcommands behind the `zptower` binary.

pub mod commands;
pub mod compute;
pub mod spec_file;
pub mod store;
pub mod suites;
