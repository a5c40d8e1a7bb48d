//! Scenario runner: TOML configs in, CSV/JSON artifacts plus a checksummed
//! manifest out.

pub mod config;
pub mod error;
pub mod manifest;
pub mod scenarios;
pub mod schema;

pub use config::{ScenarioConfig, ScenarioKind};
pub use error::{LabError, Result};
pub use manifest::{verify_manifest, RunManifest, RunStatus};
