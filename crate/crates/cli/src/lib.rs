//! Configuration, CSV output and the pipelines behind the `contact-weakkam`
//! binary.

pub mod config;
pub mod fixtures;
pub mod io;
pub mod pipelines;

pub use config::{parse_config, ConfigError, RunConfig};
pub use pipelines::Outcome;
