//! One module per subcommand. Each `run` takes the shared context plus its
//! own arguments, writes artifacts into the output directory, prints a
//! result block to stdout, and emits a manifest.

pub mod example1;
pub mod experiment;
pub mod figure1;
pub mod report;
pub mod sweep;
pub mod verify;
