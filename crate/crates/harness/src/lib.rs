//! Seeded campaign runner for the opjensen checks: JSON config in, JSON Lines
//! reports and a CSV summary out.

pub mod campaign;
pub mod cli;
pub mod config;

use opjensen_core::Error as CoreError;
use thiserror::Error;

pub use campaign::{run_campaign, CampaignRun, CampaignSummary};
pub use cli::cli_entry;
pub use config::{CampaignConfig, DimSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Io(_) => EXIT_USAGE,
            HarnessError::Core(e) => match e {
                CoreError::Argument(_)
                | CoreError::UnknownFunction { .. }
                | CoreError::Dimension(_)
                | CoreError::Hypothesis(_)
                | CoreError::Partition(_)
                | CoreError::NotConvex(_) => EXIT_USAGE,
                CoreError::Numeric(_)
                | CoreError::Domain { .. }
                | CoreError::BoundaryAmbiguity { .. }
                | CoreError::BlockMismatch(_) => EXIT_NUMERIC,
            },
        }
    }
}
