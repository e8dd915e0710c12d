//! Input files, reports and command dispatch for the `qkul` binary.

pub mod commands;
pub mod input;
pub mod json;

pub use commands::{run_command, Command, JordanChoice, Outcome, Settings};
pub use input::{parse_input, print_input, InputError, InputSpec};
