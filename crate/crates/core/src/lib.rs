//! Multi-worker screening and reputational bargaining.
//!
//! Workers negotiate wages with a firm whose productivity is private
//! information. A worker either screens, making an offer only the high type
//! accepts, or pools at the low output. Accepted wages leak to coworkers
//! through a sharing matrix, so the firm's acceptance decisions are linked.

pub mod error;
pub mod model;
pub mod alt_offers;
pub mod payoff;
pub mod play;
pub mod game;
pub mod solver;
pub mod discrimination;
pub mod report;
pub mod sim;
pub mod sweep;
pub mod props;

pub use error::{Error, Result};
pub use model::{ModelParams, SharingMatrix, Variant, WageProfile, WorkerId, WorkerPartition, WorkerSet, EPS};
