//! Configuration, orchestration and serialization around the thin-film
//! solvers in `thinfilm-core`.

pub mod config;
pub mod expr;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_str, ConfigError, Model, Overrides, RunConfig};
pub use run::{run, RunError};
