//! Match sessions, batch runs and the live service around `setpath-core`.

pub mod api;
pub mod batch;
pub mod frames;
pub mod session;

pub use batch::{process_batch, BatchReport};
pub use session::{PipelineError, RoundResult, RoundSubmission, SessionStore, TacticDistribution};
