//! Deterministic simulator of a joint auction / coalition-formation game
//! for UAV-assisted federated learning over vehicular networks.
//!
//! UAVs relay model parameters between cells of FL workers and the model
//! owner. Each UAV has an energy budget that caps how many FL iterations it
//! can support per cell; UAVs form coalitions to cover a full training run,
//! cells bid for coalitions, and a merge-and-split search looks for the
//! partition of the UAV set that maximizes the sellers' total profit under
//! the auction allocation.
//!
//! The crate is organized along the pipeline:
//!
//! - [`scenario`]: configuration types, validation, worker selection;
//! - [`radio`]: link rates, per-iteration energies, iteration budgets;
//! - [`coalition`]: partitions, Bell counting, schedules, merge-and-split;
//! - [`auction`]: valuations, bids, payments, the allocation mechanisms;
//! - [`oracle`]: exhaustive searches and an independent stability
//!   certificate for small instances.

pub mod auction;
pub mod coalition;
pub mod error;
pub mod oracle;
pub mod radio;
pub mod scenario;

pub use auction::{allocate, AuctionOutcome, Bid};
pub use coalition::{
    bell_number, enumerate_partitions, merge_and_split, Coalition, IterationSchedule, Partition,
    SearchEvent,
};
pub use error::{Error, Result};
pub use oracle::OracleReport;
pub use scenario::{load_scenario, PaymentRule, ScenarioConfig};
