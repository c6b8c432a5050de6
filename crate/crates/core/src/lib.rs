//! Agent-based simulator of the production side of an economy.
//!
//! Heterogeneous firms run multi-month production processes, mutually
//! requiring labor and capital in a firm-specific recipe. A central planner
//! acts as the entire demand side: it diffuses production orders, buys
//! finished goods from firm inventories, and allocates investment goods back
//! to firms under a configurable distribution policy. National accounts are
//! aggregated from firm balance sheets and checked for stock-flow
//! consistency every simulated year.
//!
//! The crate is organized around the per-month event schedule in
//! [`sim::World::run_tick`]:
//!
//! 1. planner decides cycle actions
//! 2. planner diffuses production orders
//! 3. firms accept, queue or reject orders
//! 4. production processes run (with failure hazards)
//! 5. planner distributes investment goods; firms adapt labor and capital
//! 6. firms conclude production into inventories
//! 7. planner purchases consumption and investment goods
//! 8. firms close their per-month statements
//! 9. on year boundaries, national accounts are aggregated
//!
//! Runs are deterministic for a given seed and configuration, independent of
//! the number of worker threads.

pub mod accounting;
pub mod adapt;
pub mod catalog;
pub mod config;
pub mod error;
pub mod firm;
pub mod output;
pub mod planner;
pub mod population;
pub mod rng;
pub mod sim;

pub use catalog::{builtin_catalog, FirmClass, Sector};
pub use config::{preset, preset_names, ScenarioConfig};
pub use error::SimError;
pub use sim::{RunOutput, World};
