//! Library surface of the `moran-dim` CLI: configuration, the fixture
//! registry, and the command pipelines. The binary is a thin wrapper; the
//! acceptance suite drives these entry points directly.

pub mod config;
pub mod fixtures;
pub mod pipeline;

pub use config::RunConfig;
pub use pipeline::Session;
